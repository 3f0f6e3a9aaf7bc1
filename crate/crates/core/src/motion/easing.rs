use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const DEFAULT_ELASTIC_AMPLITUDE: f64 = 1.0;
pub const DEFAULT_ELASTIC_PERIOD: f64 = 0.3;

const BEZIER_TOLERANCE: f64 = 1e-6;
const NEWTON_ITERATIONS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Easing {
    Linear,
    Ease,
    EaseIn,
    EaseOut,
    EaseInOut,
    CubicBezier { x1: f64, y1: f64, x2: f64, y2: f64 },
    ElasticOut { amplitude: f64, period: f64 },
    BounceOut,
    Steps(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid easing {input:?}: {reason}")]
pub struct EasingParseError {
    pub input: String,
    pub reason: String,
}

impl Easing {
    /// Names accepted by the parser, for prompts and diagnostics.
    pub const VOCABULARY: &'static [&'static str] = &[
        "linear",
        "ease",
        "ease-in",
        "ease-out",
        "ease-in-out",
        "cubic-bezier(x1, y1, x2, y2)",
        "elastic-out(amplitude, period)",
        "bounce-out",
        "steps(n)",
    ];

    /// CSS can express this easing as an animation-timing-function.
    pub fn is_native(&self) -> bool {
        !matches!(self, Easing::ElasticOut { .. } | Easing::BounceOut)
    }

    /// The equivalent control points for the CSS bezier presets.
    pub fn control_points(&self) -> Option<(f64, f64, f64, f64)> {
        match *self {
            Easing::Ease => Some((0.25, 0.1, 0.25, 1.0)),
            Easing::EaseIn => Some((0.42, 0.0, 1.0, 1.0)),
            Easing::EaseOut => Some((0.0, 0.0, 0.58, 1.0)),
            Easing::EaseInOut => Some((0.42, 0.0, 0.58, 1.0)),
            Easing::CubicBezier { x1, y1, x2, y2 } => Some((x1, y1, x2, y2)),
            _ => None,
        }
    }

    /// Parameter range violations, empty when the easing is usable.
    pub fn check(&self) -> Result<(), String> {
        match *self {
            Easing::CubicBezier { x1, y1, x2, y2 } => {
                if ![x1, y1, x2, y2].iter().all(|v| v.is_finite()) {
                    return Err("cubic-bezier parameters must be finite".into());
                }
                if !(0.0..=1.0).contains(&x1) || !(0.0..=1.0).contains(&x2) {
                    return Err("cubic-bezier x1 and x2 must lie in [0, 1]".into());
                }
            }
            Easing::ElasticOut { amplitude, period } => {
                if !(amplitude.is_finite() && amplitude >= 1.0) {
                    return Err("elastic-out amplitude must be >= 1".into());
                }
                if !(period.is_finite() && period > 0.0) {
                    return Err("elastic-out period must be > 0".into());
                }
            }
            Easing::Steps(0) => return Err("steps count must be >= 1".into()),
            _ => {}
        }
        Ok(())
    }
}

/// Value progress for time progress `u`. Inputs outside [0, 1] are clamped.
pub fn sample_easing(e: &Easing, u: f64) -> f64 {
    if !(u > 0.0) {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    match *e {
        Easing::Linear => u,
        Easing::ElasticOut { amplitude, period } => elastic_out(amplitude, period, u),
        Easing::BounceOut => bounce_out(u),
        Easing::Steps(n) => {
            let n = n.max(1) as f64;
            (u * n).floor() / n
        }
        _ => {
            let (x1, y1, x2, y2) = e.control_points().unwrap_or((0.0, 0.0, 1.0, 1.0));
            let t = solve_bezier_x(x1, x2, u);
            bezier_coord(y1, y2, t)
        }
    }
}

fn elastic_out(amplitude: f64, period: f64, u: f64) -> f64 {
    let a = amplitude.max(1.0);
    let tau = std::f64::consts::TAU;
    let s = period / tau * (1.0 / a).asin();
    a * 2f64.powf(-10.0 * u) * ((u - s) * tau / period).sin() + 1.0
}

fn bounce_out(u: f64) -> f64 {
    const N1: f64 = 7.5625;
    const D1: f64 = 2.75;
    if u < 1.0 / D1 {
        N1 * u * u
    } else if u < 2.0 / D1 {
        let v = u - 1.5 / D1;
        N1 * v * v + 0.75
    } else if u < 2.5 / D1 {
        let v = u - 2.25 / D1;
        N1 * v * v + 0.9375
    } else {
        let v = u - 2.625 / D1;
        N1 * v * v + 0.984375
    }
}

/// One coordinate of a unit cubic Bezier with endpoints 0 and 1.
pub fn bezier_coord(p1: f64, p2: f64, t: f64) -> f64 {
    let mt = 1.0 - t;
    3.0 * mt * mt * t * p1 + 3.0 * mt * t * t * p2 + t * t * t
}

fn bezier_coord_deriv(p1: f64, p2: f64, t: f64) -> f64 {
    let mt = 1.0 - t;
    3.0 * mt * mt * p1 + 6.0 * mt * t * (p2 - p1) + 3.0 * t * t * (1.0 - p2)
}

/// Parameter `t` with `|x(t) - u| <= 1e-6`: Newton first, bisection when
/// Newton stalls or leaves [0, 1].
pub fn solve_bezier_x(x1: f64, x2: f64, u: f64) -> f64 {
    let mut t = u;
    for _ in 0..NEWTON_ITERATIONS {
        let err = bezier_coord(x1, x2, t) - u;
        if err.abs() <= BEZIER_TOLERANCE {
            return t;
        }
        let d = bezier_coord_deriv(x1, x2, t);
        if d.abs() < 1e-9 {
            break;
        }
        let next = t - err / d;
        if !(0.0..=1.0).contains(&next) {
            break;
        }
        t = next;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut mid = u;
    for _ in 0..100 {
        mid = 0.5 * (lo + hi);
        let x = bezier_coord(x1, x2, mid);
        if (x - u).abs() <= BEZIER_TOLERANCE * 0.5 {
            break;
        }
        if x < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}

impl fmt::Display for Easing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Easing::Linear => f.write_str("linear"),
            Easing::Ease => f.write_str("ease"),
            Easing::EaseIn => f.write_str("ease-in"),
            Easing::EaseOut => f.write_str("ease-out"),
            Easing::EaseInOut => f.write_str("ease-in-out"),
            Easing::CubicBezier { x1, y1, x2, y2 } => write!(f, "cubic-bezier({x1}, {y1}, {x2}, {y2})"),
            Easing::ElasticOut { amplitude, period } => write!(f, "elastic-out({amplitude}, {period})"),
            Easing::BounceOut => f.write_str("bounce-out"),
            Easing::Steps(n) => write!(f, "steps({n})"),
        }
    }
}

impl FromStr for Easing {
    type Err = EasingParseError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| EasingParseError {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let s = input.trim().to_ascii_lowercase();
        let (name, args) = match s.find('(') {
            Some(open) => {
                let inner = s[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| fail("missing closing parenthesis"))?;
                let args = inner
                    .split(',')
                    .map(|a| {
                        let a = a.trim();
                        let ok = a.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.');
                        a.parse::<f64>()
                            .ok()
                            .filter(|v| ok && v.is_finite())
                            .ok_or_else(|| fail("arguments must be numbers"))
                    })
                    .collect::<Result<Vec<f64>, _>>()?;
                (s[..open].trim().to_string(), Some(args))
            }
            None => (s.clone(), None),
        };
        let easing = match (name.as_str(), args.as_deref()) {
            ("linear", None) => Easing::Linear,
            ("ease", None) => Easing::Ease,
            ("ease-in", None) => Easing::EaseIn,
            ("ease-out", None) => Easing::EaseOut,
            ("ease-in-out", None) => Easing::EaseInOut,
            ("cubic-bezier", Some(&[x1, y1, x2, y2])) => Easing::CubicBezier { x1, y1, x2, y2 },
            ("cubic-bezier", _) => return Err(fail("cubic-bezier takes 4 arguments")),
            ("elastic" | "elastic-out", None) => Easing::ElasticOut {
                amplitude: DEFAULT_ELASTIC_AMPLITUDE,
                period: DEFAULT_ELASTIC_PERIOD,
            },
            ("elastic" | "elastic-out", Some(&[amplitude])) => Easing::ElasticOut {
                amplitude,
                period: DEFAULT_ELASTIC_PERIOD,
            },
            ("elastic" | "elastic-out", Some(&[amplitude, period])) => Easing::ElasticOut { amplitude, period },
            ("elastic" | "elastic-out", _) => return Err(fail("elastic-out takes at most 2 arguments")),
            ("bounce" | "bounce-out", None) => Easing::BounceOut,
            ("steps", Some(&[n])) => {
                if n.fract() != 0.0 || !(1.0..=u32::MAX as f64).contains(&n) {
                    return Err(fail("steps count must be a positive integer"));
                }
                Easing::Steps(n as u32)
            }
            ("steps", _) => return Err(fail("steps takes 1 argument")),
            _ => return Err(fail("unknown easing")),
        };
        easing.check().map_err(|r| fail(&r))?;
        Ok(easing)
    }
}

impl Serialize for Easing {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Easing {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elastic() -> Easing {
        Easing::ElasticOut {
            amplitude: 1.0,
            period: DEFAULT_ELASTIC_PERIOD,
        }
    }

    #[test]
    fn examples() {
        assert_eq!(sample_easing(&Easing::Linear, 0.5), 0.5);
        let sym = Easing::CubicBezier {
            x1: 0.42,
            y1: 0.0,
            x2: 0.58,
            y2: 1.0,
        };
        assert!((sample_easing(&sym, 0.5) - 0.5).abs() < 1e-6);
        assert_eq!(sample_easing(&elastic(), 1.0), 1.0);
        assert!((sample_easing(&elastic(), 0.5) - 1.015625).abs() < 1e-9);
    }

    #[test]
    fn ease_preset_matches_bisection_golden() {
        // Computed offline by plain bisection on x(t) = 0.5 to 1e-15.
        let golden = 0.802403387584;
        assert!((sample_easing(&Easing::Ease, 0.5) - golden).abs() < 1e-6);
    }

    #[test]
    fn steps_and_bounce() {
        let s = Easing::Steps(2);
        let got: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|&u| sample_easing(&s, u)).collect();
        assert_eq!(got, vec![0.0, 0.0, 0.5, 0.5, 1.0]);
        assert_eq!(sample_easing(&Easing::BounceOut, 1.0), 1.0);
        assert!((sample_easing(&Easing::BounceOut, 0.5) - 0.765625).abs() < 1e-12);
    }

    #[test]
    fn parse_and_display() {
        for text in [
            "linear",
            "ease",
            "ease-in",
            "ease-out",
            "ease-in-out",
            "cubic-bezier(0.25, 0.1, 0.25, 1)",
            "elastic-out(1, 0.3)",
            "bounce-out",
            "steps(4)",
        ] {
            let e: Easing = text.parse().unwrap();
            assert_eq!(e.to_string(), text);
        }
        assert_eq!("elastic".parse::<Easing>().unwrap(), elastic());
        assert_eq!("Elastic-Out( 2 )".parse::<Easing>().unwrap().to_string(), "elastic-out(2, 0.3)");
        assert!("cubic-bezier(1.5, 0, 0, 1)".parse::<Easing>().is_err());
        assert!("elastic-out(0.5, 0.3)".parse::<Easing>().is_err());
        assert!("steps(0)".parse::<Easing>().is_err());
        assert!("steps(1.5)".parse::<Easing>().is_err());
        assert!("cubic-bezier(nan, 0, 0, 1)".parse::<Easing>().is_err());
        assert!("wobble".parse::<Easing>().is_err());
    }
}
