//! Versioned policy files.
//!
//! Fixed-K and tabular policies are line-oriented text:
//!
//! ```text
//! bor-depth-policy 1
//! kind tabular
//! scale <offset> <scale>
//! edges <slot> <v1> <v2> ...        (one line per binned feature)
//! entry <k0> .. <k5> <q_stop> <q_continue>
//! ```
//!
//! Neural policies are binary, all integers `u32` and all reals `f64`,
//! little-endian: magic `BORQNET\0`, version, score offset, score scale,
//! layer count, then per layer its input and output sizes, the row-major
//! weights and the biases.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::features::{Discretizer, ScoreScale, StateKey, BINNED, FEATURE_COUNT};
use super::neural::{Dense, QNetwork};
use super::{FixedKPolicy, NeuralPolicy, Policy, TabularPolicy};
use crate::error::{Error, Result};

/// Version written into both policy formats.
pub const FORMAT_VERSION: u32 = 1;
const TEXT_HEADER: &str = "bor-depth-policy 1";
const MAGIC: &[u8; 8] = b"BORQNET\0";
const BINARY_VERSION: u32 = FORMAT_VERSION;

pub fn write_policy<W: Write>(policy: &Policy, mut w: W) -> std::io::Result<()> {
    match policy {
        Policy::Fixed(p) => write!(w, "{TEXT_HEADER}\nkind fixed\nk {}\n", p.k),
        Policy::Tabular(p) => write_tabular(p, w),
        Policy::Neural(p) => write_neural(p, w),
    }
}

fn write_tabular<W: Write>(p: &TabularPolicy, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{TEXT_HEADER}")?;
    writeln!(w, "kind tabular")?;
    writeln!(w, "scale {:?} {:?}", p.scale.offset, p.scale.scale)?;
    for (slot, edges) in p.discretizer.edges.iter().enumerate() {
        write!(w, "edges {slot}")?;
        for e in edges {
            write!(w, " {e:?}")?;
        }
        writeln!(w)?;
    }
    for (key, q) in &p.table {
        write!(w, "entry")?;
        for k in key {
            write!(w, " {k}")?;
        }
        writeln!(w, " {:?} {:?}", q[0], q[1])?;
    }
    Ok(())
}

fn write_neural<W: Write>(p: &NeuralPolicy, mut w: W) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&BINARY_VERSION.to_le_bytes())?;
    w.write_all(&p.scale.offset.to_le_bytes())?;
    w.write_all(&p.scale.scale.to_le_bytes())?;
    w.write_all(&(p.network.layers.len() as u32).to_le_bytes())?;
    for layer in &p.network.layers {
        w.write_all(&(layer.inputs as u32).to_le_bytes())?;
        w.write_all(&(layer.outputs as u32).to_le_bytes())?;
        for v in layer.weights.iter().chain(&layer.bias) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Conventional location of a trained policy under an output root:
/// `policies/<method>/seed-<seed>.policy`.
pub fn policy_path(root: &Path, method: &str, seed: u64) -> PathBuf {
    root.join("policies").join(method).join(format!("seed-{seed}.policy"))
}

/// Writes `policy` to `path`, creating parent directories.
pub fn save_policy(path: &Path, policy: &Policy) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_policy(policy, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_policy(path: &Path) -> Result<Policy> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_policy(BufReader::new(file), &path.display().to_string())
}

pub fn read_policy<R: BufRead>(mut r: R, source_name: &str) -> Result<Policy> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| Error::data(source_name, e.to_string()))?;
    if bytes.starts_with(MAGIC) {
        read_neural(&bytes, source_name)
    } else {
        let text = std::str::from_utf8(&bytes).map_err(|_| Error::data(source_name, "not a policy file"))?;
        read_text(text, source_name)
    }
}

fn read_text(text: &str, source: &str) -> Result<Policy> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, TEXT_HEADER)) => {}
        Some((_, other)) => return Err(Error::data(source, format!("unsupported policy header {other:?}"))),
        None => return Err(Error::data(source, "empty policy file")),
    }
    let bad = |line: usize, msg: &str| Error::data(source, format!("line {line}: {msg}"));
    let num =
        |line: usize, s: &str| -> Result<f64> { s.parse::<f64>().map_err(|_| bad(line, &format!("bad number {s:?}"))) };

    let (line, kind) = lines.next().ok_or_else(|| bad(2, "missing kind"))?;
    match kind {
        "kind fixed" => {
            let (line, k) = lines.next().ok_or_else(|| bad(3, "missing k"))?;
            let k = k
                .strip_prefix("k ")
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| bad(line, "expected `k <depth>`"))?;
            FixedKPolicy::new(k)
                .map(Policy::Fixed)
                .map_err(|e| bad(line, &e.to_string()))
        }
        "kind tabular" => {
            let mut scale = None;
            let mut edges = vec![Vec::new(); BINNED.len()];
            let mut table = BTreeMap::new();
            for (line, l) in lines {
                let mut parts = l.split_ascii_whitespace();
                match parts.next() {
                    Some("scale") => {
                        let v: Vec<&str> = parts.collect();
                        if v.len() != 2 {
                            return Err(bad(line, "expected `scale <offset> <scale>`"));
                        }
                        scale = Some(ScoreScale {
                            offset: num(line, v[0])?,
                            scale: num(line, v[1])?,
                        });
                    }
                    Some("edges") => {
                        let slot = parts
                            .next()
                            .and_then(|s| s.parse::<usize>().ok())
                            .filter(|&s| s < BINNED.len())
                            .ok_or_else(|| bad(line, "bad edge slot"))?;
                        let values = parts.map(|s| num(line, s)).collect::<Result<Vec<_>>>()?;
                        if values.windows(2).any(|w| !(w[0] < w[1])) {
                            return Err(bad(line, "edges must be strictly increasing"));
                        }
                        edges[slot] = values;
                    }
                    Some("entry") => {
                        let v: Vec<&str> = parts.collect();
                        if v.len() != FEATURE_COUNT + 2 {
                            return Err(bad(line, "entry needs 6 key fields and 2 values"));
                        }
                        let mut key: StateKey = [0; FEATURE_COUNT];
                        for (k, s) in key.iter_mut().zip(&v) {
                            *k = s.parse().map_err(|_| bad(line, "bad key field"))?;
                        }
                        table.insert(key, [num(line, v[6])?, num(line, v[7])?]);
                    }
                    None => {}
                    Some(other) => return Err(bad(line, &format!("unknown record {other:?}"))),
                }
            }
            Ok(Policy::Tabular(TabularPolicy {
                scale: scale.ok_or_else(|| Error::data(source, "missing scale line"))?,
                discretizer: Discretizer { edges },
                table,
            }))
        }
        other => Err(bad(line, &format!("unknown policy kind {other:?}"))),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    source: &'a str,
}

impl Cursor<'_> {
    fn take<const W: usize>(&mut self) -> Result<[u8; W]> {
        if self.bytes.len() < W {
            return Err(Error::data(self.source, "truncated policy file"));
        }
        let (head, rest) = self.bytes.split_at(W);
        self.bytes = rest;
        Ok(head.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        self.take::<4>().map(u32::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64> {
        self.take::<8>().map(f64::from_le_bytes)
    }
}

fn read_neural(bytes: &[u8], source: &str) -> Result<Policy> {
    let mut c = Cursor {
        bytes: &bytes[MAGIC.len()..],
        source,
    };
    let version = c.u32()?;
    if version != BINARY_VERSION {
        return Err(Error::data(source, format!("unsupported network version {version}")));
    }
    let scale = ScoreScale {
        offset: c.f64()?,
        scale: c.f64()?,
    };
    let count = c.u32()? as usize;
    let mut layers = Vec::with_capacity(count.min(64));
    for _ in 0..count {
        let inputs = c.u32()? as usize;
        let outputs = c.u32()? as usize;
        if inputs * outputs > c.bytes.len() / 8 {
            return Err(Error::data(source, "truncated policy file"));
        }
        let weights = (0..inputs * outputs).map(|_| c.f64()).collect::<Result<_>>()?;
        let bias = (0..outputs).map(|_| c.f64()).collect::<Result<_>>()?;
        layers.push(Dense {
            inputs,
            outputs,
            weights,
            bias,
        });
    }
    if !c.bytes.is_empty() {
        return Err(Error::data(source, "trailing bytes after network"));
    }
    let chained = layers.windows(2).all(|w| w[0].outputs == w[1].inputs);
    if layers.is_empty() || !chained || layers[0].inputs != FEATURE_COUNT || layers.last().map(|l| l.outputs) != Some(2)
    {
        return Err(Error::data(
            source,
            "network shape does not map 6 features to 2 actions",
        ));
    }
    Ok(Policy::Neural(NeuralPolicy {
        scale,
        network: QNetwork { layers },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn round_trip(p: &Policy) -> Policy {
        let mut buf = Vec::new();
        write_policy(p, &mut buf).unwrap();
        read_policy(buf.as_slice(), "mem").unwrap()
    }

    #[test]
    fn fixed_round_trip() {
        let p = Policy::Fixed(FixedKPolicy { k: 7 });
        assert_eq!(round_trip(&p), p);
    }

    #[test]
    fn tabular_round_trip() {
        let mut table = BTreeMap::new();
        table.insert([1, 0, 4, 2, 3, 9], [0.1 + 0.2, -1e-300]);
        table.insert([0, 0, 0, 0, 0, 1], [f64::MIN_POSITIVE, 6.643856189774724]);
        let p = Policy::Tabular(TabularPolicy {
            scale: ScoreScale {
                offset: 0.125,
                scale: 3.3,
            },
            discretizer: Discretizer::uniform(5),
            table,
        });
        assert_eq!(round_trip(&p), p);
    }

    #[test]
    fn neural_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Policy::Neural(NeuralPolicy {
            scale: ScoreScale::default(),
            network: QNetwork::new(&[6, 4, 2], &mut rng),
        });
        assert_eq!(round_trip(&p), p);
    }

    #[test]
    fn rejects_damaged_files() {
        assert!(read_policy("bor-depth-policy 2\n".as_bytes(), "m").is_err());
        assert!(read_policy("bor-depth-policy 1\nkind fixed\nk 0\n".as_bytes(), "m").is_err());
        let mut buf = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Policy::Neural(NeuralPolicy {
            scale: ScoreScale::default(),
            network: QNetwork::new(&[6, 4, 2], &mut rng),
        });
        write_policy(&p, &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_policy(buf.as_slice(), "m").is_err());
    }
}
