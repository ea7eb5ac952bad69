//! Plain-text serialization of [`FactoredDistribution`].
//!
//! The format is line oriented and diff friendly:
//!
//! ```text
//! [support]
//! x_values = 0 1
//! y_count = 2
//! m_values = m1 m2
//! d_values = d1 d2
//!
//! [p_d]
//! 0.5 0.5
//!
//! [p_m_given_d]
//! d1: 1 0
//! d2: 0 1
//!
//! [p_xy_given_d]
//! d1:
//! 0.1 0.9
//! d2:
//! 0.9 0.1
//! ```
//!
//! `#` starts a comment anywhere on a line. Rows of `p_m_given_d` must be
//! labeled with the domain symbols in support order; each `p_xy_given_d`
//! block has one row per feature value with one probability per class.
//! Numbers are emitted with Rust's shortest round-trip `f64` formatting, so
//! `parse(emit(f))` reproduces `f` bit for bit.

use std::fmt::Write as _;

use thiserror::Error;

use crate::distribution::{FactoredDistribution, ValidationError};
use crate::support::Support;
use crate::textformat::{parse_kv, split_sections, Line, Section};

#[derive(Debug, Error)]
pub enum SpecFileError {
    #[error("line {line}: content before any [section] header")]
    ContentBeforeHeader { line: usize },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("duplicate section [{name}] at line {line}")]
    DuplicateSection { line: usize, name: String },
    #[error("missing required section [{name}]")]
    MissingSection { name: &'static str },
    #[error("[{section}] line {line}: {message}")]
    Malformed {
        section: &'static str,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

fn parse_f64(
    section: &'static str,
    line: usize,
    token: &str,
) -> Result<f64, SpecFileError> {
    // f64::from_str accepts nan/inf spellings; probabilities never are.
    let value: f64 = token.parse().map_err(|_| SpecFileError::Malformed {
        section,
        line,
        message: format!("'{token}' is not a number"),
    })?;
    if !value.is_finite() {
        return Err(SpecFileError::Malformed {
            section,
            line,
            message: format!("'{token}' is not finite"),
        });
    }
    Ok(value)
}

fn parse_row(
    section: &'static str,
    line: &Line,
    text: &str,
) -> Result<Vec<f64>, SpecFileError> {
    text.split_whitespace()
        .map(|token| parse_f64(section, line.number, token))
        .collect()
}

fn parse_support(section: &Section) -> Result<Support, SpecFileError> {
    const NAME: &str = "support";
    let mut x_values: Option<Vec<f64>> = None;
    let mut y_count: Option<usize> = None;
    let mut m_values: Option<Vec<String>> = None;
    let mut d_values: Option<Vec<String>> = None;
    for line in &section.lines {
        let (key, value) = parse_kv(&line.text).ok_or_else(|| SpecFileError::Malformed {
            section: NAME,
            line: line.number,
            message: "expected 'key = value'".to_string(),
        })?;
        let duplicate = |set: bool| -> Result<(), SpecFileError> {
            if set {
                Err(SpecFileError::Malformed {
                    section: NAME,
                    line: line.number,
                    message: format!("duplicate key '{key}'"),
                })
            } else {
                Ok(())
            }
        };
        match key {
            "x_values" => {
                duplicate(x_values.is_some())?;
                x_values = Some(parse_row(NAME, line, value)?);
            }
            "y_count" => {
                duplicate(y_count.is_some())?;
                let n: usize = value.parse().map_err(|_| SpecFileError::Malformed {
                    section: NAME,
                    line: line.number,
                    message: format!("'{value}' is not a count"),
                })?;
                y_count = Some(n);
            }
            "m_values" => {
                duplicate(m_values.is_some())?;
                m_values = Some(value.split_whitespace().map(str::to_string).collect());
            }
            "d_values" => {
                duplicate(d_values.is_some())?;
                d_values = Some(value.split_whitespace().map(str::to_string).collect());
            }
            other => {
                return Err(SpecFileError::Malformed {
                    section: NAME,
                    line: line.number,
                    message: format!("unknown key '{other}'"),
                })
            }
        }
    }
    let require = |name: &str, line: usize| SpecFileError::Malformed {
        section: NAME,
        line,
        message: format!("missing key '{name}'"),
    };
    let header = section.header_line;
    let support = Support::new(
        x_values.ok_or_else(|| require("x_values", header))?,
        y_count.ok_or_else(|| require("y_count", header))?,
        m_values.ok_or_else(|| require("m_values", header))?,
        d_values.ok_or_else(|| require("d_values", header))?,
    )
    .map_err(ValidationError::from)?;
    Ok(support)
}

fn parse_p_d(section: &Section) -> Result<Vec<f64>, SpecFileError> {
    const NAME: &str = "p_d";
    match section.lines.as_slice() {
        [line] => parse_row(NAME, line, &line.text),
        [] => Err(SpecFileError::Malformed {
            section: NAME,
            line: section.header_line,
            message: "expected one row of domain weights".to_string(),
        }),
        [_, extra, ..] => Err(SpecFileError::Malformed {
            section: NAME,
            line: extra.number,
            message: "expected a single row".to_string(),
        }),
    }
}

fn parse_p_m_given_d(
    section: &Section,
    support: &Support,
) -> Result<Vec<Vec<f64>>, SpecFileError> {
    const NAME: &str = "p_m_given_d";
    let mut rows = Vec::with_capacity(support.d_count());
    for (d, line) in section.lines.iter().enumerate() {
        let (label, row_text) =
            parse_kv(&line.text).ok_or_else(|| SpecFileError::Malformed {
                section: NAME,
                line: line.number,
                message: "expected 'domain: probabilities'".to_string(),
            })?;
        let expected = support
            .d_values()
            .get(d)
            .map(String::as_str)
            .unwrap_or("(none)");
        if label != expected {
            return Err(SpecFileError::Malformed {
                section: NAME,
                line: line.number,
                message: format!("expected row for '{expected}', found '{label}'"),
            });
        }
        rows.push(parse_row(NAME, line, row_text)?);
    }
    if rows.len() != support.d_count() {
        return Err(SpecFileError::Malformed {
            section: NAME,
            line: section.header_line,
            message: format!(
                "expected {} rows, found {}",
                support.d_count(),
                rows.len()
            ),
        });
    }
    Ok(rows)
}

fn parse_p_xy_given_d(
    section: &Section,
    support: &Support,
) -> Result<Vec<Vec<f64>>, SpecFileError> {
    const NAME: &str = "p_xy_given_d";
    fn close_block(
        support: &Support,
        blocks: &mut Vec<Vec<f64>>,
        current: &mut Option<(usize, Vec<f64>)>,
    ) -> Result<(), SpecFileError> {
        if let Some((line, block)) = current.take() {
            if block.len() != support.x_count() * support.y_count() {
                return Err(SpecFileError::Malformed {
                    section: NAME,
                    line,
                    message: format!(
                        "block has {} entries, expected {} rows of {} classes",
                        block.len(),
                        support.x_count(),
                        support.y_count()
                    ),
                });
            }
            blocks.push(block);
        }
        Ok(())
    }
    let mut blocks: Vec<Vec<f64>> = Vec::with_capacity(support.d_count());
    let mut current: Option<(usize, Vec<f64>)> = None;
    for line in &section.lines {
        if let Some(label) = line.text.strip_suffix(':') {
            close_block(support, &mut blocks, &mut current)?;
            let expected = support
                .d_values()
                .get(blocks.len())
                .map(String::as_str)
                .unwrap_or("(none)");
            if label.trim() != expected {
                return Err(SpecFileError::Malformed {
                    section: NAME,
                    line: line.number,
                    message: format!(
                        "expected block header '{expected}:', found '{}'",
                        line.text
                    ),
                });
            }
            current = Some((line.number, Vec::new()));
            continue;
        }
        let row = parse_row(NAME, line, &line.text)?;
        if row.len() != support.y_count() {
            return Err(SpecFileError::Malformed {
                section: NAME,
                line: line.number,
                message: format!(
                    "row has {} entries, expected one per class ({})",
                    row.len(),
                    support.y_count()
                ),
            });
        }
        match current.as_mut() {
            Some((_, block)) => block.extend(row),
            None => {
                return Err(SpecFileError::Malformed {
                    section: NAME,
                    line: line.number,
                    message: "row appears before any domain block header".to_string(),
                })
            }
        }
    }
    close_block(support, &mut blocks, &mut current)?;
    if blocks.len() != support.d_count() {
        return Err(SpecFileError::Malformed {
            section: NAME,
            line: section.header_line,
            message: format!(
                "expected {} domain blocks, found {}",
                support.d_count(),
                blocks.len()
            ),
        });
    }
    Ok(blocks)
}

/// Parses the text form into a validated distribution.
pub fn parse_spec(text: &str) -> Result<FactoredDistribution, SpecFileError> {
    let sections = split_sections(text);
    let mut support_sec: Option<&Section> = None;
    let mut p_d_sec: Option<&Section> = None;
    let mut p_m_sec: Option<&Section> = None;
    let mut p_xy_sec: Option<&Section> = None;
    for section in &sections {
        let slot = match section.name.as_str() {
            "" => {
                return Err(SpecFileError::ContentBeforeHeader {
                    line: section.lines[0].number,
                })
            }
            "support" => &mut support_sec,
            "p_d" => &mut p_d_sec,
            "p_m_given_d" => &mut p_m_sec,
            "p_xy_given_d" => &mut p_xy_sec,
            other => {
                return Err(SpecFileError::UnknownSection {
                    line: section.header_line,
                    name: other.to_string(),
                })
            }
        };
        if slot.is_some() {
            return Err(SpecFileError::DuplicateSection {
                line: section.header_line,
                name: section.name.clone(),
            });
        }
        *slot = Some(section);
    }
    let support_sec =
        support_sec.ok_or(SpecFileError::MissingSection { name: "support" })?;
    let p_d_sec = p_d_sec.ok_or(SpecFileError::MissingSection { name: "p_d" })?;
    let p_m_sec = p_m_sec.ok_or(SpecFileError::MissingSection {
        name: "p_m_given_d",
    })?;
    let p_xy_sec = p_xy_sec.ok_or(SpecFileError::MissingSection {
        name: "p_xy_given_d",
    })?;

    let support = parse_support(support_sec)?;
    let p_d = parse_p_d(p_d_sec)?;
    let p_m_given_d = parse_p_m_given_d(p_m_sec, &support)?;
    let p_xy_given_d = parse_p_xy_given_d(p_xy_sec, &support)?;
    Ok(FactoredDistribution::new(
        support,
        p_d,
        p_m_given_d,
        p_xy_given_d,
    )?)
}

fn push_floats(out: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        // Shortest round-trip formatting keeps emit/parse bit-exact.
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

/// Renders a distribution in the text format parsed by [`parse_spec`].
pub fn emit_spec(f: &FactoredDistribution) -> String {
    let s = f.support();
    let mut out = String::new();
    out.push_str("[support]\n");
    out.push_str("x_values = ");
    {
        let mut row = String::new();
        push_floats(&mut row, s.x_values());
        out.push_str(&row);
    }
    writeln!(out, "y_count = {}", s.y_count()).unwrap();
    writeln!(out, "m_values = {}", s.m_values().join(" ")).unwrap();
    writeln!(out, "d_values = {}", s.d_values().join(" ")).unwrap();
    out.push_str("\n[p_d]\n");
    push_floats(&mut out, f.p_d());
    out.push_str("\n[p_m_given_d]\n");
    for (d, name) in s.d_values().iter().enumerate() {
        write!(out, "{name}: ").unwrap();
        push_floats(&mut out, f.p_m_given_d(d));
    }
    out.push_str("\n[p_xy_given_d]\n");
    for (d, name) in s.d_values().iter().enumerate() {
        writeln!(out, "{name}:").unwrap();
        for x in 0..s.x_count() {
            let start = x * s.y_count();
            push_floats(&mut out, &f.p_xy_given_d(d)[start..start + s.y_count()]);
        }
    }
    out
}

/// Reads and parses a spec file from disk.
pub fn load_spec(path: &std::path::Path) -> Result<FactoredDistribution, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text).map_err(|source| LoadError::Parse {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: SpecFileError,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    const PD1: &str = "\
[support]
x_values = 0
y_count = 2
m_values = m1 m2
d_values = d1 d2

[p_d]
0.5 0.5

[p_m_given_d]
d1: 1 0
d2: 0 1

[p_xy_given_d]
d1:
0.1 0.9
d2:
0.9 0.1
";

    #[test]
    fn round_trip_is_bit_exact() {
        let f = parse_spec(PD1).unwrap();
        let text = emit_spec(&f);
        let g = parse_spec(&text).unwrap();
        assert_eq!(f, g);
        assert_eq!(text, emit_spec(&g));
    }

    #[test]
    fn errors_carry_line_and_section() {
        let bad = PD1.replace("d2: 0 1", "dX: 0 1");
        let err = parse_spec(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("[p_m_given_d]"), "{msg}");
        assert!(msg.contains("'d2'"), "{msg}");
        assert!(msg.contains("line 12"), "{msg}");
    }

    #[test]
    fn non_finite_tokens_are_rejected() {
        let bad = PD1.replace("0.1 0.9", "nan 0.9");
        let err = parse_spec(&bad).unwrap_err();
        assert!(err.to_string().contains("not finite"), "{err}");
    }

    #[test]
    fn missing_section_is_reported() {
        let bad = PD1.replace("[p_d]\n0.5 0.5\n", "");
        let err = parse_spec(&bad).unwrap_err();
        assert!(matches!(err, SpecFileError::MissingSection { name: "p_d" }));
    }

    #[test]
    fn comments_are_ignored() {
        let commented = format!("# synthetic two-domain instance\n{PD1}");
        assert!(parse_spec(&commented).is_ok());
    }
}
