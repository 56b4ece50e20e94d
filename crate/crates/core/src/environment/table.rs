//! Plain-text dump of an environment: a few `#` header lines followed by one
//! `index radius` pair per line.

use std::fmt::Write as _;

use super::{Environment, Model, RadiusDistribution, RadiusLaw};
use crate::error::{Error, Result};

const MAGIC: &str = "# reinforced-perc environment v1";

pub fn write_environment_table(env: &Environment) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    let _ = writeln!(out, "# model {}", env.model());
    let _ = writeln!(out, "# law {}", env.distribution().law());
    let _ = writeln!(out, "# env_seed {}", env.env_seed());
    for (n, x) in env.iter() {
        let _ = writeln!(out, "{n} {x}");
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_environment_table(text: &str) -> Result<Environment> {
    let mut model = None;
    let mut law = None;
    let mut seed = None;
    let mut seen_magic = false;
    let mut rows: Vec<(i64, u64)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            if line == MAGIC {
                seen_magic = true;
                continue;
            }
            let header = header.trim();
            let (key, value) = header.split_once(' ').unwrap_or((header, ""));
            let value = value.trim();
            match key {
                "model" => {
                    model = Some(value.parse::<Model>().map_err(|e| parse_err(line_no, e.to_string()))?)
                }
                "law" => {
                    law = Some(value.parse::<RadiusLaw>().map_err(|e| parse_err(line_no, e.to_string()))?)
                }
                "env_seed" => {
                    seed = Some(
                        value
                            .parse::<u64>()
                            .map_err(|e| parse_err(line_no, format!("bad env_seed: {e}")))?,
                    )
                }
                _ => {}
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(line_no, "expected `index radius`"));
        };
        let n: i64 = a
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad index {a:?}: {e}")))?;
        let x: u64 = b
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad radius {b:?}: {e}")))?;
        if x == 0 {
            return Err(parse_err(line_no, "radius must be >= 1"));
        }
        if let Some(&(prev, _)) = rows.last() {
            if prev.checked_add(1) != Some(n) {
                return Err(parse_err(line_no, format!("index {n} does not follow {prev}")));
            }
        }
        rows.push((n, x));
    }

    if !seen_magic {
        return Err(parse_err(1, "missing environment table header"));
    }
    let model = model.ok_or_else(|| parse_err(0, "missing `# model` header"))?;
    let law = law.ok_or_else(|| parse_err(0, "missing `# law` header"))?;
    let seed = seed.ok_or_else(|| parse_err(0, "missing `# env_seed` header"))?;
    let (first, last) = match (rows.first(), rows.last()) {
        (Some(f), Some(l)) => (f.0, l.0),
        _ => return Err(parse_err(0, "no radius rows")),
    };
    if first.checked_neg() != Some(last) {
        return Err(parse_err(0, format!("indices span [{first}, {last}], not [-N, N]")));
    }
    let dist = RadiusDistribution::new(law)?;
    Environment::from_radii(model, &dist, seed, rows.into_iter().map(|(_, x)| x).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let d = RadiusDistribution::geometric(0.3).unwrap();
        for model in [Model::Overlap, Model::Stack] {
            let e = Environment::sample(model, &d, 25, 99);
            let text = write_environment_table(&e);
            assert!(text.contains("\n-25 "));
            assert_eq!(parse_environment_table(&text).unwrap(), e);
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "# reinforced-perc environment v1\n# model stack\n# law constant radius=1\n# env_seed 1\n-1 1\n0 x\n1 1\n";
        match parse_environment_table(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
        let gap = "# reinforced-perc environment v1\n# model stack\n# law constant radius=1\n# env_seed 1\n-1 1\n1 1\n";
        assert!(matches!(parse_environment_table(gap), Err(Error::Parse { line: 6, .. })));
        assert!(parse_environment_table("").is_err());
        let lopsided = "# reinforced-perc environment v1\n# model stack\n# law constant radius=1\n# env_seed 1\n0 1\n1 1\n";
        assert!(parse_environment_table(lopsided).is_err());
    }
}
