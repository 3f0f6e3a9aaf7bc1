use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::lexer::Cursor;
use super::Point;

/// SVG `matrix(a b c d e f)`: maps `(x, y)` to `(a·x + c·y + e, b·x + d·y + f)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Default for Affine {
    fn default() -> Self {
        Affine::IDENTITY
    }
}

impl Affine {
    pub const IDENTITY: Affine = Affine::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Self {
        Affine { a, b, c, d, e, f }
    }

    pub fn translate(tx: f64, ty: f64) -> Self {
        Affine::new(1.0, 0.0, 0.0, 1.0, tx, ty)
    }

    pub fn scale(sx: f64, sy: f64) -> Self {
        Affine::new(sx, 0.0, 0.0, sy, 0.0, 0.0)
    }

    /// Rotation by `deg` degrees. Multiples of 90° are produced exactly.
    pub fn rotate(deg: f64) -> Self {
        let (sin, cos) = sin_cos_deg(deg);
        Affine::new(cos, sin, -sin, cos, 0.0, 0.0)
    }

    pub fn rotate_about(deg: f64, cx: f64, cy: f64) -> Self {
        Affine::translate(cx, cy) * Affine::rotate(deg) * Affine::translate(-cx, -cy)
    }

    pub fn skew_x(deg: f64) -> Self {
        Affine::new(1.0, 0.0, deg.to_radians().tan(), 1.0, 0.0, 0.0)
    }

    pub fn skew_y(deg: f64) -> Self {
        Affine::new(1.0, deg.to_radians().tan(), 0.0, 1.0, 0.0, 0.0)
    }

    pub fn coeffs(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            self.a * p.x + self.c * p.y + self.e,
            self.b * p.x + self.d * p.y + self.f,
        )
    }

    pub fn is_identity(&self) -> bool {
        *self == Affine::IDENTITY
    }

    /// Largest entrywise difference between two matrices.
    pub fn max_abs_diff(&self, other: &Affine) -> f64 {
        self.coeffs()
            .iter()
            .zip(other.coeffs().iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// `lhs * rhs` applies `rhs` first, matching left-to-right SVG transform lists.
impl Mul for Affine {
    type Output = Affine;

    fn mul(self, r: Affine) -> Affine {
        Affine::new(
            self.a * r.a + self.c * r.b,
            self.b * r.a + self.d * r.b,
            self.a * r.c + self.c * r.d,
            self.b * r.c + self.d * r.d,
            self.a * r.e + self.c * r.f + self.e,
            self.b * r.e + self.d * r.f + self.f,
        )
    }
}

fn sin_cos_deg(deg: f64) -> (f64, f64) {
    let turns = deg / 90.0;
    if turns.fract() == 0.0 && turns.abs() < 1e15 {
        return match (turns as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
    }
    deg.to_radians().sin_cos()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("transform parse error at offset {position}: expected {expected}")]
pub struct TransformParseError {
    pub position: usize,
    pub expected: &'static str,
}

/// Parses an SVG transform list into its left-to-right composition.
pub fn parse_transform_list(text: &str) -> Result<Affine, TransformParseError> {
    let mut cur = Cursor::new(text);
    let mut acc = Affine::IDENTITY;
    let err = |cur: &Cursor, expected| TransformParseError {
        position: cur.pos(),
        expected,
    };
    loop {
        cur.skip_comma_ws();
        if cur.at_end() {
            return Ok(acc);
        }
        let name = if cur.eat_keyword("matrix") {
            "matrix"
        } else if cur.eat_keyword("translate") {
            "translate"
        } else if cur.eat_keyword("scale") {
            "scale"
        } else if cur.eat_keyword("rotate") {
            "rotate"
        } else if cur.eat_keyword("skewX") {
            "skewX"
        } else if cur.eat_keyword("skewY") {
            "skewY"
        } else {
            return Err(err(&cur, "transform function name"));
        };
        cur.skip_ws();
        if cur.peek() != Some(b'(') {
            return Err(err(&cur, "'('"));
        }
        cur.bump();
        let mut args = Vec::with_capacity(6);
        cur.skip_ws();
        while let Some(v) = cur.number() {
            args.push(v);
            cur.skip_comma_ws();
        }
        if cur.peek() != Some(b')') {
            return Err(err(&cur, if args.is_empty() { "number" } else { "')'" }));
        }
        let close = cur.pos();
        cur.bump();
        let arity_err = TransformParseError {
            position: close,
            expected: "argument count valid for the transform function",
        };
        let m = match (name, args.as_slice()) {
            ("matrix", &[a, b, c, d, e, f]) => Affine::new(a, b, c, d, e, f),
            ("translate", &[tx]) => Affine::translate(tx, 0.0),
            ("translate", &[tx, ty]) => Affine::translate(tx, ty),
            ("scale", &[s]) => Affine::scale(s, s),
            ("scale", &[sx, sy]) => Affine::scale(sx, sy),
            ("rotate", &[a]) => Affine::rotate(a),
            ("rotate", &[a, cx, cy]) => Affine::rotate_about(a, cx, cy),
            ("skewX", &[a]) => Affine::skew_x(a),
            ("skewY", &[a]) => Affine::skew_y(a),
            _ => return Err(arity_err),
        };
        acc = acc * m;
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "matrix({} {} {} {} {} {})",
            crate::num::fmt_precise(self.a),
            crate::num::fmt_precise(self.b),
            crate::num::fmt_precise(self.c),
            crate::num::fmt_precise(self.d),
            crate::num::fmt_precise(self.e),
            crate::num::fmt_precise(self.f)
        )
    }
}
