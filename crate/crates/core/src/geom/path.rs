use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::bbox::cubic_extrema;
use super::lexer::Cursor;
use super::{Affine, Point, Rect};

/// One cubic Bézier segment; its start is the previous segment's end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicSegment {
    pub c1: Point,
    pub c2: Point,
    pub end: Point,
}

/// A cubic with its start point made explicit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicBez {
    pub p0: Point,
    pub p1: Point,
    pub p2: Point,
    pub p3: Point,
}

impl CubicBez {
    pub fn eval(&self, t: f64) -> Point {
        let mt = 1.0 - t;
        let w0 = mt * mt * mt;
        let w1 = 3.0 * mt * mt * t;
        let w2 = 3.0 * mt * t * t;
        let w3 = t * t * t;
        Point::new(
            w0 * self.p0.x + w1 * self.p1.x + w2 * self.p2.x + w3 * self.p3.x,
            w0 * self.p0.y + w1 * self.p1.y + w2 * self.p2.y + w3 * self.p3.y,
        )
    }

    pub fn bbox(&self) -> Rect {
        let mut r = Rect::from_point(self.p0).include(self.p3);
        for t in cubic_extrema(self.p0.x, self.p1.x, self.p2.x, self.p3.x) {
            r = r.include(self.eval(t));
        }
        for t in cubic_extrema(self.p0.y, self.p1.y, self.p2.y, self.p3.y) {
            r = r.include(self.eval(t));
        }
        r
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subpath {
    pub start: Point,
    pub segments: Vec<CubicSegment>,
    pub closed: bool,
}

impl Subpath {
    fn new(start: Point) -> Self {
        Subpath {
            start,
            segments: Vec::new(),
            closed: false,
        }
    }

    fn current(&self) -> Point {
        self.segments.last().map_or(self.start, |s| s.end)
    }

    pub fn cubics(&self) -> impl Iterator<Item = CubicBez> + '_ {
        let mut prev = self.start;
        self.segments.iter().map(move |s| {
            let c = CubicBez {
                p0: prev,
                p1: s.c1,
                p2: s.c2,
                p3: s.end,
            };
            prev = s.end;
            c
        })
    }
}

/// Path geometry with every command lowered to absolute cubic Béziers.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PathData {
    pub subpaths: Vec<Subpath>,
}

impl PathData {
    pub fn cubics(&self) -> impl Iterator<Item = CubicBez> + '_ {
        self.subpaths.iter().flat_map(Subpath::cubics)
    }

    pub fn bbox(&self) -> Option<Rect> {
        let mut out: Option<Rect> = None;
        for sp in &self.subpaths {
            let mut r = Rect::from_point(sp.start);
            for c in sp.cubics() {
                r = r.union(c.bbox());
            }
            out = Some(out.map_or(r, |o| o.union(r)));
        }
        out
    }

    pub fn transformed(&self, m: &Affine) -> PathData {
        PathData {
            subpaths: self
                .subpaths
                .iter()
                .map(|sp| Subpath {
                    start: m.apply(sp.start),
                    segments: sp
                        .segments
                        .iter()
                        .map(|s| CubicSegment {
                            c1: m.apply(s.c1),
                            c2: m.apply(s.c2),
                            end: m.apply(s.end),
                        })
                        .collect(),
                    closed: sp.closed,
                })
                .collect(),
        }
    }

    pub(crate) fn move_to(&mut self, p: Point) {
        self.subpaths.push(Subpath::new(p));
    }

    pub(crate) fn line_to(&mut self, p: Point) {
        let cur = self.last_mut().current();
        self.push(line_segment(cur, p));
    }

    pub(crate) fn push(&mut self, seg: CubicSegment) {
        self.last_mut().segments.push(seg);
    }

    pub(crate) fn close(&mut self) {
        let sp = self.last_mut();
        let (cur, start) = (sp.current(), sp.start);
        if cur != start {
            sp.segments.push(line_segment(cur, start));
        }
        sp.closed = true;
    }

    pub(crate) fn current(&self) -> Point {
        self.subpaths.last().map_or(Point::default(), Subpath::current)
    }

    fn last_mut(&mut self) -> &mut Subpath {
        if self.subpaths.is_empty() {
            self.subpaths.push(Subpath::new(Point::default()));
        }
        self.subpaths.last_mut().unwrap()
    }
}

fn line_segment(from: Point, to: Point) -> CubicSegment {
    CubicSegment {
        c1: from.lerp(to, 1.0 / 3.0),
        c2: from.lerp(to, 2.0 / 3.0),
        end: to,
    }
}

fn quad_segment(from: Point, ctrl: Point, to: Point) -> CubicSegment {
    CubicSegment {
        c1: from.lerp(ctrl, 2.0 / 3.0),
        c2: to.lerp(ctrl, 2.0 / 3.0),
        end: to,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("path data error at offset {position}: expected {expected}")]
pub struct PathParseError {
    pub position: usize,
    pub expected: &'static str,
}

/// Parses SVG path data. Relative commands are resolved, quadratics are
/// degree-elevated and arcs are approximated with at most 90° per cubic.
pub fn parse_path_data(d: &str) -> Result<PathData, PathParseError> {
    let mut cur = Cursor::new(d);
    let mut path = PathData::default();
    let mut cmd: Option<u8> = None;
    // Reflection sources for S/s and T/t.
    let mut last_cubic_ctrl: Option<Point> = None;
    let mut last_quad_ctrl: Option<Point> = None;
    // Subpath start to reopen at after a Z.
    let mut reopen: Option<Point> = None;

    loop {
        cur.skip_ws();
        if cur.at_end() {
            break;
        }
        let c = match cur.peek() {
            Some(b) if b.is_ascii_alphabetic() => {
                if !b"MmLlHhVvCcSsQqTtAaZz".contains(&b) {
                    return Err(PathParseError {
                        position: cur.pos(),
                        expected: "path command",
                    });
                }
                cur.bump();
                b
            }
            Some(_) if cur.at_number() => match cmd {
                Some(b'M') => b'L',
                Some(b'm') => b'l',
                Some(b'Z' | b'z') | None => {
                    return Err(PathParseError {
                        position: cur.pos(),
                        expected: if cmd.is_none() { "moveto" } else { "path command" },
                    })
                }
                Some(prev) => prev,
            },
            _ => {
                return Err(PathParseError {
                    position: cur.pos(),
                    expected: "path command",
                })
            }
        };
        if cmd.is_none() && !matches!(c, b'M' | b'm') {
            return Err(PathParseError {
                position: cur.pos().saturating_sub(1),
                expected: "moveto",
            });
        }
        cmd = Some(c);

        if let Some(start) = reopen.take() {
            if !matches!(c, b'M' | b'm' | b'Z' | b'z') {
                path.move_to(start);
            }
        }

        let rel = c.is_ascii_lowercase();
        let origin = if rel { path.current() } else { Point::default() };
        let abs = |x: f64, y: f64| Point::new(origin.x + x, origin.y + y);
        let prev_cubic = last_cubic_ctrl.take();
        let prev_quad = last_quad_ctrl.take();

        match c.to_ascii_uppercase() {
            b'Z' => {
                path.close();
                reopen = Some(path.subpaths.last().map(|s| s.start).unwrap_or_default());
                continue;
            }
            b'M' => {
                let (x, y) = pair(&mut cur)?;
                path.move_to(abs(x, y));
            }
            b'L' => {
                let (x, y) = pair(&mut cur)?;
                path.line_to(abs(x, y));
            }
            b'H' => {
                let x = coord(&mut cur, "x-coordinate")?;
                let cp = path.current();
                path.line_to(Point::new(if rel { cp.x + x } else { x }, cp.y));
            }
            b'V' => {
                let y = coord(&mut cur, "y-coordinate")?;
                let cp = path.current();
                path.line_to(Point::new(cp.x, if rel { cp.y + y } else { y }));
            }
            b'C' => {
                let (x1, y1) = pair(&mut cur)?;
                let (x2, y2) = pair(&mut cur)?;
                let (x, y) = pair(&mut cur)?;
                let seg = CubicSegment {
                    c1: abs(x1, y1),
                    c2: abs(x2, y2),
                    end: abs(x, y),
                };
                last_cubic_ctrl = Some(seg.c2);
                path.push(seg);
            }
            b'S' => {
                let (x2, y2) = pair(&mut cur)?;
                let (x, y) = pair(&mut cur)?;
                let cp = path.current();
                let c1 = prev_cubic.map_or(cp, |p| Point::new(2.0 * cp.x - p.x, 2.0 * cp.y - p.y));
                let seg = CubicSegment {
                    c1,
                    c2: abs(x2, y2),
                    end: abs(x, y),
                };
                last_cubic_ctrl = Some(seg.c2);
                path.push(seg);
            }
            b'Q' => {
                let (x1, y1) = pair(&mut cur)?;
                let (x, y) = pair(&mut cur)?;
                let ctrl = abs(x1, y1);
                let cp = path.current();
                path.push(quad_segment(cp, ctrl, abs(x, y)));
                last_quad_ctrl = Some(ctrl);
            }
            b'T' => {
                let (x, y) = pair(&mut cur)?;
                let cp = path.current();
                let ctrl = prev_quad.map_or(cp, |p| Point::new(2.0 * cp.x - p.x, 2.0 * cp.y - p.y));
                path.push(quad_segment(cp, ctrl, abs(x, y)));
                last_quad_ctrl = Some(ctrl);
            }
            b'A' => {
                let rx = coord(&mut cur, "x-radius")?;
                let ry = coord(&mut cur, "y-radius")?;
                let rot = coord(&mut cur, "x-axis-rotation")?;
                let large = flag(&mut cur, "large-arc flag")?;
                let sweep = flag(&mut cur, "sweep flag")?;
                let (x, y) = pair(&mut cur)?;
                let from = path.current();
                for seg in arc_to_cubics(from, rx, ry, rot, large, sweep, abs(x, y)) {
                    path.push(seg);
                }
            }
            _ => unreachable!("command set checked above"),
        }
        cur.skip_comma_ws();
    }
    if path.subpaths.is_empty() {
        return Err(PathParseError {
            position: cur.pos(),
            expected: "moveto",
        });
    }
    Ok(path)
}

fn coord(cur: &mut Cursor, expected: &'static str) -> Result<f64, PathParseError> {
    cur.skip_comma_ws();
    cur.number().ok_or(PathParseError {
        position: cur.pos(),
        expected,
    })
}

fn pair(cur: &mut Cursor) -> Result<(f64, f64), PathParseError> {
    Ok((coord(cur, "x-coordinate")?, coord(cur, "y-coordinate")?))
}

fn flag(cur: &mut Cursor, expected: &'static str) -> Result<bool, PathParseError> {
    cur.skip_comma_ws();
    cur.flag().ok_or(PathParseError {
        position: cur.pos(),
        expected,
    })
}

/// Converts an SVG elliptical arc into cubic segments using the
/// endpoint-to-center parameterization. Each cubic spans at most 90°.
pub fn arc_to_cubics(
    from: Point,
    rx: f64,
    ry: f64,
    x_axis_rotation_deg: f64,
    large_arc: bool,
    sweep: bool,
    to: Point,
) -> Vec<CubicSegment> {
    if from == to {
        return Vec::new();
    }
    let (mut rx, mut ry) = (rx.abs(), ry.abs());
    if rx == 0.0 || ry == 0.0 {
        return vec![line_segment(from, to)];
    }
    let phi = x_axis_rotation_deg.to_radians();
    let (sin_phi, cos_phi) = phi.sin_cos();
    let dx2 = (from.x - to.x) / 2.0;
    let dy2 = (from.y - to.y) / 2.0;
    let x1p = cos_phi * dx2 + sin_phi * dy2;
    let y1p = -sin_phi * dx2 + cos_phi * dy2;

    let lambda = (x1p * x1p) / (rx * rx) + (y1p * y1p) / (ry * ry);
    if lambda > 1.0 {
        let s = lambda.sqrt();
        rx *= s;
        ry *= s;
    }
    let (rx2, ry2) = (rx * rx, ry * ry);
    let num = rx2 * ry2 - rx2 * y1p * y1p - ry2 * x1p * x1p;
    let den = rx2 * y1p * y1p + ry2 * x1p * x1p;
    let mut coef = if den == 0.0 { 0.0 } else { (num / den).max(0.0).sqrt() };
    if large_arc == sweep {
        coef = -coef;
    }
    let cxp = coef * rx * y1p / ry;
    let cyp = -coef * ry * x1p / rx;
    let cx = cos_phi * cxp - sin_phi * cyp + (from.x + to.x) / 2.0;
    let cy = sin_phi * cxp + cos_phi * cyp + (from.y + to.y) / 2.0;

    let ux = (x1p - cxp) / rx;
    let uy = (y1p - cyp) / ry;
    let vx = (-x1p - cxp) / rx;
    let vy = (-y1p - cyp) / ry;
    let theta1 = uy.atan2(ux);
    let mut dtheta = (ux * vy - uy * vx).atan2(ux * vx + uy * vy);
    if !sweep && dtheta > 0.0 {
        dtheta -= 2.0 * PI;
    } else if sweep && dtheta < 0.0 {
        dtheta += 2.0 * PI;
    }

    let n = ((dtheta.abs() / FRAC_PI_2) - 1e-9).ceil().max(1.0) as usize;
    let delta = dtheta / n as f64;
    let handle = arc_handle(delta.abs()).copysign(delta);
    let to_user = Affine::translate(cx, cy)
        * Affine::new(cos_phi, sin_phi, -sin_phi, cos_phi, 0.0, 0.0)
        * Affine::scale(rx, ry);

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = theta1 + delta * i as f64;
        let b = a + delta;
        let (sa, ca) = a.sin_cos();
        let (sb, cb) = b.sin_cos();
        let c1 = Point::new(ca - handle * sa, sa + handle * ca);
        let c2 = Point::new(cb + handle * sb, sb - handle * cb);
        let end = if i + 1 == n {
            to
        } else {
            to_user.apply(Point::new(cb, sb))
        };
        out.push(CubicSegment {
            c1: to_user.apply(c1),
            c2: to_user.apply(c2),
            end,
        });
    }
    out
}

/// Handle length for a unit-circle cubic spanning `theta` radians that
/// equalizes the outward and inward radial error (minimax), rather than
/// pinning the midpoint to the circle.
fn arc_handle(theta: f64) -> f64 {
    let standard = 4.0 / 3.0 * (theta / 4.0).tan();
    if theta < 1e-3 {
        return standard;
    }
    let half = theta / 2.0;
    let (s, c) = half.sin_cos();
    let mid_err = |k: f64| c + 0.75 * k * s - 1.0;
    let max_err = |k: f64| {
        let radial = |t: f64| {
            let cubic = CubicBez {
                p0: Point::new(c, -s),
                p1: Point::new(c + k * s, -s + k * c),
                p2: Point::new(c + k * s, s - k * c),
                p3: Point::new(c, s),
            };
            let p = cubic.eval(t);
            p.x.hypot(p.y) - 1.0
        };
        // coarse scan, then golden-section refinement around the peak
        let steps = 32;
        let mut best_t = 0.0;
        let mut best = f64::MIN;
        for i in 0..=steps {
            let t = 0.5 * i as f64 / steps as f64;
            let v = radial(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        let (mut lo, mut hi) = ((best_t - 0.5 / steps as f64).max(0.0), (best_t + 0.5 / steps as f64).min(0.5));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..40 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if radial(m1) < radial(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        best.max(radial(0.5 * (lo + hi)))
    };
    let (mut lo, mut hi) = (standard * 0.99, standard);
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        if max_err(mid) + mid_err(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Point, b: Point) -> bool {
        a.distance(b) < 1e-12
    }

    #[test]
    fn line_is_degree_elevated() {
        let p = parse_path_data("M0 0 L10 0").unwrap();
        assert_eq!(p.subpaths.len(), 1);
        let sp = &p.subpaths[0];
        assert!(!sp.closed);
        assert_eq!(sp.segments.len(), 1);
        let s = sp.segments[0];
        assert!(close(s.c1, Point::new(10.0 / 3.0, 0.0)));
        assert!(close(s.c2, Point::new(20.0 / 3.0, 0.0)));
        assert_eq!(s.end, Point::new(10.0, 0.0));
    }

    #[test]
    fn relative_commands_resolve() {
        let p = parse_path_data("m 2 3 l 4 0").unwrap();
        assert_eq!(p.subpaths[0].start, Point::new(2.0, 3.0));
        assert_eq!(p.subpaths[0].segments[0].end, Point::new(6.0, 3.0));
    }

    #[test]
    fn missing_y_coordinate() {
        let e = parse_path_data("M 0").unwrap_err();
        assert_eq!(e.expected, "y-coordinate");
        assert_eq!(e.position, 3);
    }

    #[test]
    fn must_start_with_moveto() {
        assert_eq!(parse_path_data("L 1 2").unwrap_err().expected, "moveto");
        assert_eq!(parse_path_data("").unwrap_err().expected, "moveto");
        assert_eq!(parse_path_data("M0 0 X").unwrap_err().expected, "path command");
    }

    #[test]
    fn implicit_lineto_after_moveto() {
        let p = parse_path_data("m1 1 2 0 0 2z").unwrap();
        let sp = &p.subpaths[0];
        assert!(sp.closed);
        let ends: Vec<_> = sp.segments.iter().map(|s| s.end).collect();
        assert_eq!(
            ends,
            vec![Point::new(3.0, 1.0), Point::new(3.0, 3.0), Point::new(1.0, 1.0)]
        );
    }

    #[test]
    fn drawing_after_close_reopens_at_start() {
        let p = parse_path_data("M5 5 h1 z l 1 1").unwrap();
        assert_eq!(p.subpaths.len(), 2);
        assert_eq!(p.subpaths[1].start, Point::new(5.0, 5.0));
        assert_eq!(p.subpaths[1].segments[0].end, Point::new(6.0, 6.0));
    }

    #[test]
    fn smooth_cubic_reflects_previous_control() {
        let p = parse_path_data("M0 0 C 0 1 1 1 1 0 S 2 -1 2 0").unwrap();
        let s = p.subpaths[0].segments[1];
        assert_eq!(s.c1, Point::new(1.0, -1.0));
    }

    #[test]
    fn smooth_quad_without_previous_uses_current_point() {
        let p = parse_path_data("M0 0 T 4 0").unwrap();
        let s = p.subpaths[0].segments[0];
        assert_eq!(s.c1, Point::new(0.0, 0.0));
        assert!(close(s.c2, Point::new(4.0 / 3.0, 0.0)));
    }

    #[test]
    fn compact_arc_flags() {
        let p = parse_path_data("M0 0a5 5 0 1010 0").unwrap();
        assert_eq!(p.subpaths[0].segments.last().unwrap().end, Point::new(10.0, 0.0));
    }

    #[test]
    fn zero_radius_arc_is_a_line() {
        let p = parse_path_data("M0 0 A 0 5 0 0 1 10 0").unwrap();
        assert_eq!(p.subpaths[0].segments.len(), 1);
        assert!(close(p.subpaths[0].segments[0].c1, Point::new(10.0 / 3.0, 0.0)));
    }

    #[test]
    fn half_circle_arc_uses_two_cubics_within_tolerance() {
        let p = parse_path_data("M0 0 A 5 5 0 0 1 10 0").unwrap();
        let segs = &p.subpaths[0].segments;
        assert_eq!(segs.len(), 2);
        // Dense sampling against the analytic circle centred at (5, 0).
        let mut worst: f64 = 0.0;
        for c in p.cubics() {
            for i in 0..=1000 {
                let q = c.eval(i as f64 / 1000.0);
                worst = worst.max(((q.x - 5.0).hypot(q.y) - 5.0).abs());
            }
        }
        assert!(worst < 1e-3, "deviation {worst}");
    }

    #[test]
    fn arc_radii_scale_up_when_too_small() {
        let segs = arc_to_cubics(Point::new(0.0, 0.0), 1.0, 1.0, 0.0, false, true, Point::new(10.0, 0.0));
        assert_eq!(segs.len(), 2);
        // scaled radius is 5, so the arc bulges to y = ±5
        let p = PathData {
            subpaths: vec![Subpath {
                start: Point::default(),
                segments: segs,
                closed: false,
            }],
        };
        let b = p.bbox().unwrap();
        assert!((b.height() - 5.0).abs() < 1e-3);
    }

    #[test]
    fn minimax_handle_is_below_standard() {
        let k = arc_handle(FRAC_PI_2);
        assert!((k - 0.551915).abs() < 1e-6, "{k}");
    }
}
