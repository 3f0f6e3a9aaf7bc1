//! Shared number/whitespace scanning for path data and transform lists.

pub(crate) struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str) -> Self {
        Cursor {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    pub fn bump(&mut self) {
        self.pos += 1;
    }

    pub fn skip_ws(&mut self) {
        while let Some(b' ' | b'\t' | b'\n' | b'\r' | b'\x0c') = self.peek() {
            self.pos += 1;
        }
    }

    /// Skips whitespace, at most one comma, then whitespace again.
    pub fn skip_comma_ws(&mut self) {
        self.skip_ws();
        if self.peek() == Some(b',') {
            self.pos += 1;
            self.skip_ws();
        }
    }

    /// True when the next non-space byte could begin a number.
    pub fn at_number(&self) -> bool {
        matches!(self.peek(), Some(b'0'..=b'9' | b'.' | b'-' | b'+'))
    }

    /// Parses an SVG number at the cursor. Leaves the cursor untouched on failure.
    pub fn number(&mut self) -> Option<f64> {
        let start = self.pos;
        let mut i = self.pos;
        let s = self.src;
        if matches!(s.get(i), Some(b'+' | b'-')) {
            i += 1;
        }
        let int_start = i;
        while matches!(s.get(i), Some(b'0'..=b'9')) {
            i += 1;
        }
        let mut digits = i - int_start;
        if s.get(i) == Some(&b'.') {
            let frac_start = i + 1;
            let mut j = frac_start;
            while matches!(s.get(j), Some(b'0'..=b'9')) {
                j += 1;
            }
            if j > frac_start || digits > 0 {
                digits += j - frac_start;
                i = j;
            }
        }
        if digits == 0 {
            return None;
        }
        if matches!(s.get(i), Some(b'e' | b'E')) {
            let mut j = i + 1;
            if matches!(s.get(j), Some(b'+' | b'-')) {
                j += 1;
            }
            let exp_start = j;
            while matches!(s.get(j), Some(b'0'..=b'9')) {
                j += 1;
            }
            if j > exp_start {
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).ok()?;
        let value: f64 = text.parse().ok()?;
        if !value.is_finite() {
            return None;
        }
        self.pos = i;
        Some(value)
    }

    /// Arc flags are a single `0` or `1` and need no separator.
    pub fn flag(&mut self) -> Option<bool> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Some(false)
            }
            Some(b'1') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    pub fn eat_keyword(&mut self, word: &str) -> bool {
        let w = word.as_bytes();
        if self.src[self.pos..].starts_with(w) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numbers(text: &str) -> Vec<f64> {
        let mut c = Cursor::new(text);
        let mut out = Vec::new();
        loop {
            c.skip_comma_ws();
            match c.number() {
                Some(v) => out.push(v),
                None => break,
            }
        }
        out
    }

    #[test]
    fn compact_number_forms() {
        assert_eq!(numbers("-.5.5"), vec![-0.5, 0.5]);
        assert_eq!(numbers("1e2-3"), vec![100.0, -3.0]);
        assert_eq!(numbers("1.5e-1,2"), vec![0.15, 2.0]);
        assert_eq!(numbers("10."), vec![10.0]);
    }

    #[test]
    fn rejects_bare_sign() {
        let mut c = Cursor::new("-x");
        assert_eq!(c.number(), None);
        assert_eq!(c.pos(), 0);
    }
}
