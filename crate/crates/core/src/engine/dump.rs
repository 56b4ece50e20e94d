//! Replay format for bond configurations.
//!
//! ```text
//! # reinforced-perc bonds v1
//! # graph integer_lattice dim=1
//! # window base_radius=4 height=4
//! # env_seed 12
//! # bond_seed 99
//! # p 0.3
//! # q 0.9
//! # edges 144
//! 0f3a...
//! ```
//!
//! Edge `i` is bit `i % 8` of byte `i / 8`; bytes are written as lowercase
//! hex, 32 bytes per line. Unused bits of the final byte must be zero.

use std::fmt::Write as _;

use bitvec::prelude::*;

use super::{BondConfiguration, BondMeta, BondParams};
use crate::error::{Error, Result};
use crate::graph::{GraphKind, Window};

const MAGIC: &str = "# reinforced-perc bonds v1";
const BYTES_PER_LINE: usize = 32;

pub fn encode_bond_dump(cfg: &BondConfiguration) -> String {
    let meta = cfg.meta();
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    let _ = writeln!(out, "# graph {}", meta.graph);
    let _ = writeln!(
        out,
        "# window base_radius={} height={}",
        meta.window.base_radius, meta.window.height
    );
    match meta.env_seed {
        Some(s) => {
            let _ = writeln!(out, "# env_seed {s}");
        }
        None => out.push_str("# env_seed none\n"),
    }
    let _ = writeln!(out, "# bond_seed {}", meta.bond_seed);
    let _ = writeln!(out, "# p {}", meta.params.p);
    let _ = writeln!(out, "# q {}", meta.params.q);
    let _ = writeln!(out, "# edges {}", cfg.len());

    let bits = cfg.bits();
    let n_bytes = bits.len().div_ceil(8);
    for chunk_start in (0..n_bytes).step_by(BYTES_PER_LINE) {
        let chunk_end = (chunk_start + BYTES_PER_LINE).min(n_bytes);
        for byte_idx in chunk_start..chunk_end {
            let lo = byte_idx * 8;
            let hi = (lo + 8).min(bits.len());
            let byte = bits[lo..hi]
                .iter()
                .by_vals()
                .enumerate()
                .fold(0u8, |acc, (i, b)| acc | ((b as u8) << i));
            let _ = write!(out, "{byte:02x}");
        }
        out.push('\n');
    }
    out
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_window(line: usize, s: &str) -> Result<Window> {
    let mut base_radius = None;
    let mut height = None;
    for part in s.split_whitespace() {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected key=value, got {part:?}")))?;
        let v: u64 = v
            .parse()
            .map_err(|_| err(line, format!("bad window value {v:?}")))?;
        match k {
            "base_radius" => base_radius = Some(v),
            "height" => height = Some(v),
            _ => return Err(err(line, format!("unknown window field {k:?}"))),
        }
    }
    match (base_radius, height) {
        (Some(r), Some(h)) => Ok(Window::new(r, h)),
        _ => Err(err(line, "window needs base_radius and height")),
    }
}

fn hex_val(c: u8) -> Option<u8> {
    match c {
        b'0'..=b'9' => Some(c - b'0'),
        b'a'..=b'f' => Some(c - b'a' + 10),
        b'A'..=b'F' => Some(c - b'A' + 10),
        _ => None,
    }
}

pub fn decode_bond_dump(text: &str) -> Result<BondConfiguration> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, l)) if l == MAGIC => {}
        _ => return Err(err(1, "missing bond dump header")),
    }

    let mut graph: Option<GraphKind> = None;
    let mut window = None;
    let mut env_seed: Option<Option<u64>> = None;
    let mut bond_seed = None;
    let mut p = None;
    let mut q = None;
    let mut edges: Option<usize> = None;
    let mut bytes: Vec<u8> = Vec::new();
    let mut last_line = 1;

    for (no, line) in lines {
        last_line = no;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if !bytes.is_empty() {
                return Err(err(no, "header line after data"));
            }
            let rest = rest.trim();
            let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
            let value = value.trim();
            let float = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| err(no, format!("bad number {v:?}")))
            };
            let int = |v: &str| -> Result<u64> {
                v.parse::<u64>()
                    .map_err(|_| err(no, format!("bad integer {v:?}")))
            };
            match key {
                "graph" => graph = Some(value.parse().map_err(|e: Error| err(no, e.to_string()))?),
                "window" => window = Some(parse_window(no, value)?),
                "env_seed" => {
                    env_seed = Some(if value == "none" { None } else { Some(int(value)?) })
                }
                "bond_seed" => bond_seed = Some(int(value)?),
                "p" => p = Some(float(value)?),
                "q" => q = Some(float(value)?),
                "edges" => {
                    let n = int(value)?;
                    if n > u32::MAX as u64 {
                        return Err(err(no, "edge count too large"));
                    }
                    edges = Some(n as usize)
                }
                _ => return Err(err(no, format!("unknown header {key:?}"))),
            }
            continue;
        }
        let raw = line.as_bytes();
        if raw.len() % 2 != 0 {
            return Err(err(no, "odd number of hex digits"));
        }
        for pair in raw.chunks_exact(2) {
            match (hex_val(pair[0]), hex_val(pair[1])) {
                (Some(h), Some(l)) => bytes.push(h << 4 | l),
                _ => return Err(err(no, "invalid hex digit")),
            }
        }
        if let Some(n) = edges {
            if bytes.len() > n.div_ceil(8) {
                return Err(err(no, "more data than declared edges"));
            }
        }
    }

    let missing = |name: &str| err(last_line, format!("missing `# {name}` header"));
    let graph = graph.ok_or_else(|| missing("graph"))?;
    let window = window.ok_or_else(|| missing("window"))?;
    let env_seed = env_seed.ok_or_else(|| missing("env_seed"))?;
    let bond_seed = bond_seed.ok_or_else(|| missing("bond_seed"))?;
    let p = p.ok_or_else(|| missing("p"))?;
    let q = q.ok_or_else(|| missing("q"))?;
    let n = edges.ok_or_else(|| missing("edges"))?;
    let params = BondParams::new(p, q)?;

    if bytes.len() != n.div_ceil(8) {
        return Err(err(
            last_line,
            format!("expected {} data bytes, found {}", n.div_ceil(8), bytes.len()),
        ));
    }
    if n % 8 != 0 {
        let last = *bytes.last().expect("nonempty when n % 8 != 0");
        if last >> (n % 8) != 0 {
            return Err(err(last_line, "padding bits must be zero"));
        }
    }
    let mut bits: BitVec<u64, Lsb0> = BitVec::with_capacity(n);
    for i in 0..n {
        bits.push(bytes[i / 8] >> (i % 8) & 1 == 1);
    }
    Ok(BondConfiguration::from_bits(
        BondMeta {
            graph,
            window,
            env_seed,
            bond_seed,
            params,
        },
        bits,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::BondOracle;
    use crate::environment::Region;
    use crate::graph::{GraphSpec, WindowGraph};

    fn sample(seed: u64) -> BondConfiguration {
        let spec = GraphSpec::tree(3).unwrap();
        let w = Window::new(2, 3);
        let g = WindowGraph::new(&spec, w).unwrap();
        let r = Region::empty(&spec, w);
        BondConfiguration::sample(&g, &r, BondParams::new(0.37, 0.81).unwrap(), seed)
            .unwrap()
            .with_env_seed(5)
    }

    #[test]
    fn round_trip() {
        for seed in 0..5 {
            let cfg = sample(seed);
            let text = encode_bond_dump(&cfg);
            let back = decode_bond_dump(&text).unwrap();
            assert_eq!(back, cfg);
            for e in 0..cfg.len() as u32 {
                assert_eq!(back.is_open(e), cfg.is_open(e));
            }
        }
    }

    #[test]
    fn rejects_corruption() {
        let text = encode_bond_dump(&sample(1));
        assert!(decode_bond_dump(&text.replacen("bonds v1", "bonds v2", 1)).is_err());
        assert!(decode_bond_dump(&text.replacen("# p 0.37", "# p 1.5", 1)).is_err());
        let mut truncated: Vec<&str> = text.lines().collect();
        truncated.pop();
        assert!(decode_bond_dump(&truncated.join("\n")).is_err());
        let bad_hex = format!("{}zz\n", text.trim_end().trim_end_matches(|c: char| c.is_ascii_hexdigit()));
        assert!(decode_bond_dump(&bad_hex).is_err());
    }
}
