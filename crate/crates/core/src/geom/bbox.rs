/// Parameters in the open interval (0, 1) where the cubic coordinate
/// polynomial with control values `p0..p3` has a zero derivative.
pub fn cubic_extrema(p0: f64, p1: f64, p2: f64, p3: f64) -> Vec<f64> {
    // B'(t)/3 = a t² + b t + c
    let a = p3 - 3.0 * p2 + 3.0 * p1 - p0;
    let b = 2.0 * (p2 - 2.0 * p1 + p0);
    let c = p1 - p0;
    let scale = a.abs().max(b.abs()).max(c.abs());
    let mut roots = Vec::with_capacity(2);
    if scale == 0.0 {
        return roots;
    }
    if a.abs() <= 1e-12 * scale {
        if b.abs() > 1e-12 * scale {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            // Numerically stable pairing of the two roots.
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            if q != 0.0 {
                roots.push(q / a);
                roots.push(c / q);
            } else {
                roots.push(-b / (2.0 * a));
            }
        }
    }
    roots.retain(|t| *t > 0.0 && *t < 1.0);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_hump_peaks_at_half() {
        assert_eq!(cubic_extrema(0.0, 10.0, 10.0, 0.0), vec![0.5]);
    }

    #[test]
    fn monotone_has_no_interior_extrema() {
        assert!(cubic_extrema(0.0, 1.0, 2.0, 3.0).is_empty());
        assert!(cubic_extrema(4.0, 4.0, 4.0, 4.0).is_empty());
    }

    #[test]
    fn s_curve_has_two() {
        let r = cubic_extrema(0.0, 10.0, -10.0, 0.0);
        assert_eq!(r.len(), 2);
    }
}
