//! Shared line/section scanner for the plain-text formats (distribution
//! spec files and experiment configs). Handles `#` comments, blank lines,
//! and `[section]` headers; everything else is handed back with its
//! original line number so parse errors can point at the source.

/// One non-empty, comment-stripped line.
#[derive(Clone, Debug)]
pub(crate) struct Line {
    /// 1-based line number in the original text.
    pub number: usize,
    pub text: String,
}

#[derive(Clone, Debug)]
pub(crate) struct Section {
    pub name: String,
    /// 1-based line number of the `[name]` header.
    pub header_line: usize,
    pub lines: Vec<Line>,
}

/// Splits text into sections. Content before the first header is rejected
/// by returning it under the reserved empty section name; callers decide
/// whether that is an error.
pub(crate) fn split_sections(text: &str) -> Vec<Section> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = stripped.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            sections.push(Section {
                name: name.trim().to_string(),
                header_line: number,
                lines: Vec::new(),
            });
            continue;
        }
        let line = Line {
            number,
            text: trimmed.to_string(),
        };
        match sections.last_mut() {
            Some(section) => section.lines.push(line),
            None => sections.push(Section {
                name: String::new(),
                header_line: number,
                lines: vec![line],
            }),
        }
    }
    sections
}

/// Splits `key = value` (or `key: value`), trimming both sides. Returns
/// `None` when no separator is present.
pub(crate) fn parse_kv(line: &str) -> Option<(&str, &str)> {
    let pos = line.find(['=', ':'])?;
    let key = line[..pos].trim();
    let value = line[pos + 1..].trim();
    Some((key, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blanks_are_dropped() {
        let sections = split_sections("# top\n\n[a]\nk = v # tail\n\n[b]\n");
        assert_eq!(sections.len(), 2);
        assert_eq!(sections[0].name, "a");
        assert_eq!(sections[0].lines.len(), 1);
        assert_eq!(sections[0].lines[0].text, "k = v");
        assert_eq!(sections[0].lines[0].number, 4);
        assert!(sections[1].lines.is_empty());
    }

    #[test]
    fn content_before_any_header_lands_in_unnamed_section() {
        let sections = split_sections("stray\n[a]\n");
        assert_eq!(sections[0].name, "");
        assert_eq!(sections[0].lines[0].number, 1);
    }

    #[test]
    fn kv_accepts_both_separators() {
        assert_eq!(parse_kv("a = b"), Some(("a", "b")));
        assert_eq!(parse_kv("d1: 0.5 0.5"), Some(("d1", "0.5 0.5")));
        assert_eq!(parse_kv("no separator"), None);
    }
}
