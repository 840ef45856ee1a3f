//! Plain-text channel specification files.
//!
//! A spec document carries one state channel and, optionally, one side
//! channel. The layout is line-oriented; `#` starts a comment and blank lines
//! are ignored:
//!
//! ```text
//! x 2          # input alphabet size
//! y 2          # output alphabet size
//! s 2          # state alphabet size
//! channel      # |X|*|S| rows in (x-major, s-minor) order, |Y| entries each
//! 1/2 1/2
//! 1 0
//! 0 1
//! 1/2 1/2
//! state        # one row of |S| entries
//! 1/2 1/2
//! side 3       # optional: observation alphabet size, then |S| rows
//! 0.7 0 0.3
//! 0 0.7 0.3
//! ```
//!
//! Numbers are decimal reals; exact fractions like `3/10` are accepted and
//! converted. Parsing, serializing, and re-parsing reproduces the same model
//! bit-exactly (floats are written in shortest round-trip form).

use crate::channel::{SideChannel, StateChannelModel};
use crate::error::{Error, Result};
use crate::prob::{ProbVector, StochasticMatrix, NORMALIZATION_TOL};

fn parse_number(token: &str, line: usize) -> Result<f64> {
    if let Some((num, den)) = token.split_once('/') {
        let n: f64 = num.trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad fraction numerator '{num}'"),
        })?;
        let d: f64 = den.trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad fraction denominator '{den}'"),
        })?;
        if d == 0.0 {
            return Err(Error::Parse {
                line,
                message: "fraction with zero denominator".to_string(),
            });
        }
        Ok(n / d)
    } else {
        token.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad number '{token}'"),
        })
    }
}

fn parse_size(token: Option<&str>, what: &str, line: usize) -> Result<usize> {
    let token = token.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    let n: usize = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad {what} '{token}'"),
    })?;
    if n == 0 {
        return Err(Error::Parse {
            line,
            message: format!("{what} must be positive"),
        });
    }
    Ok(n)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
        }
    }

    /// Next non-empty line after comment stripping, with its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (idx, raw) in self.inner.by_ref() {
            let no_comment = raw.split('#').next().unwrap_or("").trim();
            if !no_comment.is_empty() {
                return Some((idx + 1, no_comment));
            }
        }
        None
    }
}

fn parse_row(content: &str, line: usize, expected: usize, what: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = content
        .split_whitespace()
        .map(|t| parse_number(t, line))
        .collect::<Result<_>>()?;
    if values.len() != expected {
        return Err(Error::Parse {
            line,
            message: format!("{what} needs {expected} entries, got {}", values.len()),
        });
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Parse {
            line,
            message: format!("{what} sums to {sum}, not 1"),
        });
    }
    if let Some(bad) = values.iter().find(|&&v| v < 0.0) {
        return Err(Error::Parse {
            line,
            message: format!("{what} has negative entry {bad}"),
        });
    }
    Ok(values)
}

/// Parses a spec document into a model and an optional side channel.
pub fn parse_spec(text: &str) -> Result<(StateChannelModel, Option<SideChannel>)> {
    let mut lines = Lines::new(text);
    let mut x_size = None;
    let mut y_size = None;
    let mut s_size = None;

    // Header: the three alphabet sizes, in any order, before `channel`.
    let channel_line = loop {
        let (line, content) = lines.next_content().ok_or(Error::Parse {
            line: 0,
            message: "missing 'channel' section".to_string(),
        })?;
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("x") => x_size = Some(parse_size(tokens.next(), "input alphabet size", line)?),
            Some("y") => y_size = Some(parse_size(tokens.next(), "output alphabet size", line)?),
            Some("s") => s_size = Some(parse_size(tokens.next(), "state alphabet size", line)?),
            Some("channel") => break line,
            Some(other) => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected alphabet size or 'channel', got '{other}'"),
                })
            }
            None => unreachable!("next_content skips blank lines"),
        }
    };

    let x_size = x_size.ok_or(Error::Parse {
        line: channel_line,
        message: "input alphabet size 'x' not declared".to_string(),
    })?;
    let y_size = y_size.ok_or(Error::Parse {
        line: channel_line,
        message: "output alphabet size 'y' not declared".to_string(),
    })?;
    let s_size = s_size.ok_or(Error::Parse {
        line: channel_line,
        message: "state alphabet size 's' not declared".to_string(),
    })?;

    let mut rows = Vec::with_capacity(x_size * s_size);
    for i in 0..x_size * s_size {
        let (line, content) = lines.next_content().ok_or(Error::Parse {
            line: channel_line,
            message: format!("channel section ended after {i} of {} rows", x_size * s_size),
        })?;
        let what = format!("channel row (x={}, s={})", i / s_size, i % s_size);
        rows.push(parse_row(content, line, y_size, &what)?);
    }

    let (line, content) = lines.next_content().ok_or(Error::Parse {
        line: 0,
        message: "missing 'state' section".to_string(),
    })?;
    if content != "state" {
        return Err(Error::Parse {
            line,
            message: format!("expected 'state', got '{content}'"),
        });
    }
    let (state_line, state_content) = lines.next_content().ok_or(Error::Parse {
        line,
        message: "missing state distribution row".to_string(),
    })?;
    let state_row = parse_row(state_content, state_line, s_size, "state distribution")?;
    if let Some(s) = state_row.iter().position(|&v| v == 0.0) {
        return Err(Error::Parse {
            line: state_line,
            message: format!("state {s} has zero probability"),
        });
    }
    let state_dist = ProbVector::new(state_row)?;

    let side = match lines.next_content() {
        None => None,
        Some((line, content)) => {
            let mut tokens = content.split_whitespace();
            if tokens.next() != Some("side") {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 'side' or end of file, got '{content}'"),
                });
            }
            let obs_size = parse_size(tokens.next(), "observation alphabet size", line)?;
            let mut side_rows = Vec::with_capacity(s_size);
            for s in 0..s_size {
                let (row_line, row_content) = lines.next_content().ok_or(Error::Parse {
                    line,
                    message: format!("side section ended after {s} of {s_size} rows"),
                })?;
                side_rows.push(parse_row(
                    row_content,
                    row_line,
                    obs_size,
                    &format!("side row (s={s})"),
                )?);
            }
            if let Some((line, content)) = lines.next_content() {
                return Err(Error::Parse {
                    line,
                    message: format!("unexpected trailing content '{content}'"),
                });
            }
            Some(SideChannel::new(StochasticMatrix::from_rows(side_rows)?))
        }
    };

    let model = StateChannelModel::new(x_size, y_size, s_size, rows, state_dist)?;
    Ok((model, side))
}

fn push_row(out: &mut String, row: &[f64]) {
    let mut first = true;
    for v in row {
        if !first {
            out.push(' ');
        }
        out.push_str(&format!("{v}"));
        first = false;
    }
    out.push('\n');
}

/// Serializes a model (and optional side channel) to the spec format.
pub fn serialize_spec(model: &StateChannelModel, side: Option<&SideChannel>) -> String {
    let mut out = String::new();
    out.push_str(&format!("x {}\n", model.x_size()));
    out.push_str(&format!("y {}\n", model.y_size()));
    out.push_str(&format!("s {}\n", model.s_size()));
    out.push_str("channel\n");
    for x in 0..model.x_size() {
        for s in 0..model.s_size() {
            push_row(&mut out, model.row(x, s));
        }
    }
    out.push_str("state\n");
    push_row(&mut out, model.state_dist().as_slice());
    if let Some(side) = side {
        out.push_str(&format!("side {}\n", side.obs_size()));
        for s in 0..side.state_size() {
            push_row(&mut out, side.matrix().row(s));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generalized_erasure, sz_channel};

    #[test]
    fn round_trip_sz() {
        let model = sz_channel(0.5).unwrap();
        let side = generalized_erasure(0.3, 2).unwrap();
        let text = serialize_spec(&model, Some(&side));
        let (model2, side2) = parse_spec(&text).unwrap();
        assert_eq!(model, model2);
        assert_eq!(Some(side), side2);
        // Serialize -> parse -> serialize is textually stable.
        assert_eq!(text, serialize_spec(&model2, side2.as_ref()));
    }

    #[test]
    fn fractions_accepted() {
        let text = "x 2\ny 2\ns 2\nchannel\n1/2 1/2\n1 0\n0 1\n1/2 1/2\nstate\n1/2 1/2\n";
        let (model, side) = parse_spec(text).unwrap();
        assert!(side.is_none());
        assert_eq!(model, sz_channel(0.5).unwrap());
    }

    #[test]
    fn bad_row_sum_is_located() {
        let text = "x 2\ny 2\ns 2\nchannel\n0.5 0.4\n1 0\n0 1\n0.5 0.5\nstate\n0.5 0.5\n";
        match parse_spec(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("sums to"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn zero_state_probability_is_rejected() {
        let text = "x 2\ny 2\ns 2\nchannel\n0.5 0.5\n1 0\n0 1\n0.5 0.5\nstate\n1 0\n";
        match parse_spec(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 10);
                assert!(message.contains("zero probability"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
