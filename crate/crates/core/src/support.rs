//! Finite supports for the four joint axes.
//!
//! A [`Support`] fixes the feature points, the number of classes, and the
//! metadata and domain symbol lists. Class labels are handled as 0-based
//! indices `0..y_count` everywhere in this crate; text output renders them
//! 1-based. Metadata and domain symbols are opaque tokens; richer metadata
//! objects (for instance a whole feature distribution standing in for the
//! symbol) are out of scope.

use serde::Serialize;
use thiserror::Error;

/// One axis of the joint law over `(X, Y, M, D)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    X,
    Y,
    M,
    D,
}

impl Axis {
    /// Canonical axis order used by every dense table in the crate.
    pub const ALL: [Axis; 4] = [Axis::X, Axis::Y, Axis::M, Axis::D];

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::M => "M",
            Axis::D => "D",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SupportError {
    #[error("{list} must be nonempty")]
    Empty { list: &'static str },
    #[error("{list}[{index}] duplicates an earlier entry")]
    Duplicate { list: &'static str, index: usize },
    #[error("y_count must be at least 2, got {y_count}")]
    TooFewClasses { y_count: usize },
    #[error("x_values[{index}] must be finite, got {value}")]
    NonFiniteFeature { index: usize, value: f64 },
    #[error("{list}[{index}] ({symbol:?}) must be a nonempty token without whitespace, ':', '=', or '#'")]
    BadSymbol {
        list: &'static str,
        index: usize,
        symbol: String,
    },
}

/// Finite support: feature points, class count, metadata and domain symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    x_values: Vec<f64>,
    y_count: usize,
    m_values: Vec<String>,
    d_values: Vec<String>,
}

fn check_symbols(list: &'static str, symbols: &[String]) -> Result<(), SupportError> {
    if symbols.is_empty() {
        return Err(SupportError::Empty { list });
    }
    for (index, symbol) in symbols.iter().enumerate() {
        let ok = !symbol.is_empty()
            && !symbol
                .chars()
                .any(|c| c.is_whitespace() || c == ':' || c == '=' || c == '#');
        if !ok {
            return Err(SupportError::BadSymbol {
                list,
                index,
                symbol: symbol.clone(),
            });
        }
        if symbols[..index].contains(symbol) {
            return Err(SupportError::Duplicate { list, index });
        }
    }
    Ok(())
}

impl Support {
    pub fn new(
        x_values: Vec<f64>,
        y_count: usize,
        m_values: Vec<String>,
        d_values: Vec<String>,
    ) -> Result<Self, SupportError> {
        if x_values.is_empty() {
            return Err(SupportError::Empty { list: "x_values" });
        }
        for (index, &value) in x_values.iter().enumerate() {
            if !value.is_finite() {
                return Err(SupportError::NonFiniteFeature { index, value });
            }
            if x_values[..index].contains(&value) {
                return Err(SupportError::Duplicate {
                    list: "x_values",
                    index,
                });
            }
        }
        if y_count < 2 {
            return Err(SupportError::TooFewClasses { y_count });
        }
        check_symbols("m_values", &m_values)?;
        check_symbols("d_values", &d_values)?;
        Ok(Support {
            x_values,
            y_count,
            m_values,
            d_values,
        })
    }

    pub fn x_values(&self) -> &[f64] {
        &self.x_values
    }

    pub fn y_count(&self) -> usize {
        self.y_count
    }

    pub fn m_values(&self) -> &[String] {
        &self.m_values
    }

    pub fn d_values(&self) -> &[String] {
        &self.d_values
    }

    pub fn x_count(&self) -> usize {
        self.x_values.len()
    }

    pub fn m_count(&self) -> usize {
        self.m_values.len()
    }

    pub fn d_count(&self) -> usize {
        self.d_values.len()
    }

    pub fn axis_len(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.x_count(),
            Axis::Y => self.y_count,
            Axis::M => self.m_count(),
            Axis::D => self.d_count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syms(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn accepts_minimal_support() {
        let s = Support::new(vec![0.0], 2, syms(&["m1"]), syms(&["d1"])).unwrap();
        assert_eq!(s.x_count(), 1);
        assert_eq!(s.axis_len(Axis::Y), 2);
    }

    #[test]
    fn rejects_duplicate_feature_points() {
        let err = Support::new(vec![1.0, 1.0], 2, syms(&["m1"]), syms(&["d1"])).unwrap_err();
        assert_eq!(
            err,
            SupportError::Duplicate {
                list: "x_values",
                index: 1
            }
        );
    }

    #[test]
    fn rejects_single_class() {
        let err = Support::new(vec![0.0], 1, syms(&["m1"]), syms(&["d1"])).unwrap_err();
        assert_eq!(err, SupportError::TooFewClasses { y_count: 1 });
    }

    #[test]
    fn rejects_symbols_that_break_the_text_format() {
        let err = Support::new(vec![0.0], 2, syms(&["a b"]), syms(&["d1"])).unwrap_err();
        assert!(matches!(err, SupportError::BadSymbol { list: "m_values", .. }));
    }
}
