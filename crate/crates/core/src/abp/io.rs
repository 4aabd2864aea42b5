//! Text format:
//!
//! ```text
//! abp <nvars> <layers>
//! layer <rows> <cols>
//! <rows·cols lines, row-major: "v:c v:c ..." pairs, a bare integer is the constant>
//! ```
//!
//! An empty entry line is the zero form. Lines starting with `#` are ignored
//! outside of layer bodies.

use super::{Abp, AbpError, Layer};
use crate::circuit::LinearForm;

pub fn parse_abp(text: &str) -> Result<Abp, AbpError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hl, header) = next_header(&mut lines).ok_or(AbpError::Syntax { line: 0, msg: "empty input".into() })?;
    let (nvars, count) = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["abp", n, k] => (num(n, hl)?, num(k, hl)?),
        _ => return Err(AbpError::Syntax { line: hl, msg: "expected `abp <nvars> <layers>`".into() }),
    };
    let mut layers = Vec::with_capacity(count);
    for _ in 0..count {
        let (ll, head) =
            next_header(&mut lines).ok_or(AbpError::Syntax { line: hl, msg: format!("expected {count} layers") })?;
        let (rows, cols) = match head.split_whitespace().collect::<Vec<_>>()[..] {
            ["layer", r, c] => (num(r, ll)?, num(c, ll)?),
            _ => return Err(AbpError::Syntax { line: ll, msg: "expected `layer <rows> <cols>`".into() }),
        };
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let (el, body) =
                lines.next().ok_or(AbpError::Syntax { line: ll, msg: format!("layer needs {} entries", rows * cols) })?;
            entries.push(LinearForm::parse_line(body, nvars, el)?);
        }
        layers.push(Layer::new(rows, cols, entries));
    }
    if let Some((l, _)) = next_header(&mut lines) {
        return Err(AbpError::Syntax { line: l, msg: "trailing input".into() });
    }
    Abp::new(nvars, layers)
}

fn next_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Option<(usize, &'a str)> {
    lines.find(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn num(s: &str, line: usize) -> Result<usize, AbpError> {
    s.parse().map_err(|_| AbpError::Syntax { line, msg: format!("bad number `{s}`") })
}

impl Abp {
    pub fn to_text(&self) -> String {
        let mut out = format!("abp {} {}\n", self.nvars, self.layers.len());
        for l in &self.layers {
            out.push_str(&format!("layer {} {}\n", l.rows, l.cols));
            for f in &l.entries {
                out.push_str(&f.to_line());
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::DEFAULT_TERM_CAP;

    #[test]
    fn parses_a_small_program() {
        let a = parse_abp("abp 2 2\nlayer 1 2\n1:1\n2:3 1\nlayer 2 1\n2:1\n\n").unwrap();
        assert_eq!(a.widths(), vec![1, 2, 1]);
        assert!(!a.is_homogeneous());
        assert_eq!(a.layers()[1].get(1, 0), &LinearForm::zero());
        assert_eq!(a.layers()[0].get(0, 1).coeff(1), 3.into());
        assert_eq!(a.layers()[0].get(0, 1).constant(), &1.into());
    }

    #[test]
    fn round_trip() {
        for n in 1..=4 {
            let a = Abp::elementary_symmetric(n, n / 2).unwrap();
            let b = parse_abp(&a.to_text()).unwrap();
            assert_eq!(a, b);
            assert_eq!(b.expand(DEFAULT_TERM_CAP).unwrap(), a.expand(DEFAULT_TERM_CAP).unwrap());
        }
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(parse_abp("abp 1\n"), Err(AbpError::Syntax { line: 1, .. })));
        assert!(matches!(parse_abp("abp 1 1\nlayer 1 1\n"), Err(AbpError::Syntax { line: 2, .. })));
        assert!(matches!(parse_abp("abp 1 1\nlayer 1 1\n3:1\n"), Err(AbpError::Circuit(_))));
        assert!(matches!(parse_abp("abp 1 2\nlayer 1 2\n1:1\n1:1\nlayer 1 1\n1:1\n"), Err(AbpError::Shape { .. })));
    }
}
