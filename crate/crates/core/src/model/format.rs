//! Explicit-state text format.
//!
//! ```text
//! states 3
//! # src dst rate
//! 0 1 2.5
//! 1 2 0.5
//! labels
//! 0: up
//! 2: repair done
//! ```
//!
//! Blank lines and lines starting with `#` are ignored anywhere. States that
//! have no line under `labels` carry the empty label set.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{merge_duplicates, ModelError, Smc, Transition};

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Sum repeated `(src, dst)` lines instead of rejecting the model.
    pub merge_duplicates: bool,
}

fn parse_err(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_index(tok: &str, line: usize, what: &str) -> Result<usize, ModelError> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected {what} index, found {tok:?}")))
}

pub fn parse_model(text: &str, opts: ParseOptions) -> Result<Smc, ModelError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim_end_matches('\r').trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty model file, expected `states <N>`"))?;
    let num_states = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["states", n] => n
            .parse::<usize>()
            .map_err(|_| parse_err(header_line, format!("invalid state count {n:?}")))?,
        _ => return Err(parse_err(header_line, "expected `states <N>`")),
    };

    let mut transitions = Vec::new();
    let mut labels: Vec<BTreeSet<String>> = vec![BTreeSet::new(); num_states];
    let mut in_labels = false;

    for (line, content) in lines {
        if !in_labels {
            if content == "labels" {
                in_labels = true;
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let [src, dst, rate] = toks.as_slice() else {
                return Err(parse_err(
                    line,
                    format!("malformed transition line {content:?}, expected `<src> <dst> <rate>`"),
                ));
            };
            let src = parse_index(src, line, "source")?;
            let dst = parse_index(dst, line, "destination")?;
            let rate = rate
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("invalid rate {rate:?}")))?;
            if src >= num_states || dst >= num_states {
                return Err(parse_err(
                    line,
                    format!("index out of range: {src} -> {dst} with {num_states} states"),
                ));
            }
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(parse_err(line, format!("non-positive rate {rate}")));
            }
            transitions.push(Transition::new(src, dst, rate));
        } else {
            let Some((state, props)) = content.split_once(':') else {
                return Err(parse_err(
                    line,
                    format!("malformed label line {content:?}, expected `<state>: <prop> ...`"),
                ));
            };
            let state = parse_index(state.trim(), line, "state")?;
            if state >= num_states {
                return Err(parse_err(
                    line,
                    format!("label for state {state} out of range"),
                ));
            }
            for prop in props.split_whitespace() {
                if !super::is_proposition_name(prop) {
                    return Err(parse_err(line, format!("invalid proposition name {prop:?}")));
                }
                labels[state].insert(prop.to_string());
            }
        }
    }

    if opts.merge_duplicates {
        transitions = merge_duplicates(transitions);
    }
    Smc::new(num_states, transitions, labels)
}

/// Renders a chain in the format accepted by [`parse_model`]. Rates use the
/// shortest round-trip decimal form, so re-parsing is exact.
pub fn write_model(smc: &Smc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "states {}", smc.num_states());
    for t in smc.transitions() {
        let _ = writeln!(out, "{} {} {:?}", t.src, t.dst, t.rate);
    }
    let _ = writeln!(out, "labels");
    for s in 0..smc.num_states() {
        let props = smc.labels(s);
        if !props.is_empty() {
            let joined: Vec<&str> = props.iter().map(String::as_str).collect();
            let _ = writeln!(out, "{}: {}", s, joined.join(" "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MACHINE: &str = "\
# toy
states 3

0 1 2.5
1 2 0.5\r
labels
0: up
2: repair done
";

    #[test]
    fn parses_transitions_and_labels() {
        let smc = parse_model(MACHINE, ParseOptions::default()).unwrap();
        assert_eq!(smc.num_states(), 3);
        assert_eq!(smc.rate(0, 1), Some(2.5));
        assert_eq!(smc.rate(1, 2), Some(0.5));
        assert!(smc.has_label(0, "up"));
        assert!(smc.labels(1).is_empty());
        assert!(smc.has_label(2, "done"));
    }

    #[test]
    fn round_trips_through_text() {
        let smc = parse_model(MACHINE, ParseOptions::default()).unwrap();
        let again = parse_model(&write_model(&smc), ParseOptions::default()).unwrap();
        assert_eq!(smc, again);
    }

    #[test]
    fn malformed_transition_reports_line() {
        let err = parse_model("states 2\n0 1\nlabels\n", ParseOptions::default()).unwrap_err();
        match err {
            ModelError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_model("states 2\n\n0 1 -3\n", ParseOptions::default()).unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
    }

    #[test]
    fn duplicates_need_opt_in() {
        let text = "states 2\n0 1 1\n0 1 2\n";
        assert!(matches!(
            parse_model(text, ParseOptions::default()),
            Err(ModelError::Invalid(_))
        ));
        let smc = parse_model(
            text,
            ParseOptions {
                merge_duplicates: true,
            },
        )
        .unwrap();
        assert_eq!(smc.rate(0, 1), Some(3.0));
    }

    #[test]
    fn header_is_required() {
        assert!(parse_model("0 1 1\n", ParseOptions::default()).is_err());
        assert!(parse_model("", ParseOptions::default()).is_err());
        assert!(parse_model("states 0\n", ParseOptions::default()).is_err());
    }
}
