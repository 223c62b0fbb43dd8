//! State files and text dumps.
//!
//! A state file is a text header followed by a binary body:
//!
//! ```text
//! MONALG-STATE v1
//! alphabet 2
//! growth exproot:d=2,beta=1/2
//! strategy lex-first
//! depth 10
//! limits <mem_bytes> <exact_bytes> <scan_letters>
//! sha256 <hex digest of the body>
//!
//! ```
//!
//! The body has, per level, a line `level <n> <|C|> <|W|> <kind>` where kind
//! is `explicit <count>`, `segment <count> <excluded letter or ->` or `top`.
//! Explicit levels are followed by their codes as little-endian `u32`.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use super::state::{CSet, ConstructionState, Level, Limits};
use super::{render, StrategySpec};
use crate::error::{Error, Result};
use crate::growth::GrowthSpec;

const MAGIC: &str = "MONALG-STATE";
const VERSION: &str = "v1";

/// Serializes a state. Equal states give identical bytes.
pub fn to_bytes(st: &ConstructionState) -> Vec<u8> {
    let mut body = Vec::new();
    for lv in &st.levels {
        let kind = match &lv.c {
            None => "top".to_string(),
            Some(CSet::Explicit(v)) => format!("explicit {}", v.len() / (lv.n + 1)),
            Some(CSet::Segment { count, exclude }) => {
                format!("segment {count} {}", exclude.map_or("-".to_string(), |x| x.to_string()))
            }
        };
        body.extend_from_slice(format!("level {} {} {} {kind}\n", lv.n, lv.c_size, lv.w_size).as_bytes());
        if let Some(CSet::Explicit(v)) = &lv.c {
            for x in v {
                body.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
    let l = &st.limits;
    let mut out = format!(
        "{MAGIC} {VERSION}\nalphabet {}\ngrowth {}\nstrategy {}\ndepth {}\nlimits {} {} {}\nsha256 {}\n\n",
        st.alphabet,
        st.growth,
        st.strategy,
        st.depth(),
        l.mem_bytes,
        l.exact_bytes,
        l.scan_letters,
        hex::encode(Sha256::digest(&body))
    )
    .into_bytes();
    out.extend_from_slice(&body);
    out
}

fn take_line<'a>(buf: &mut &'a [u8]) -> Result<&'a str> {
    let end = buf
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("unexpected end of file".into()))?;
    let line = std::str::from_utf8(&buf[..end]).map_err(|_| Error::Format("header is not text".into()))?;
    *buf = &buf[end + 1..];
    Ok(line)
}

fn field<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| Error::Format(format!("expected {key:?}, got {line:?}")))
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Format(format!("bad number {s:?}")))
}

/// Parses a state file. The body digest is checked before anything else in it.
pub fn from_bytes(bytes: &[u8]) -> Result<ConstructionState> {
    let mut buf = bytes;
    let first = take_line(&mut buf)?;
    let version = field(first, MAGIC)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version:?}")));
    }
    let alphabet: u8 = num(field(take_line(&mut buf)?, "alphabet")?)?;
    let growth: GrowthSpec = field(take_line(&mut buf)?, "growth")?.parse()?;
    let strategy: StrategySpec = field(take_line(&mut buf)?, "strategy")?.parse()?;
    let depth: usize = num(field(take_line(&mut buf)?, "depth")?)?;
    let lim: Vec<u64> = field(take_line(&mut buf)?, "limits")?
        .split(' ')
        .map(num)
        .collect::<Result<_>>()?;
    let [mem_bytes, exact_bytes, scan_letters] = lim[..] else {
        return Err(Error::Format("limits needs three values".into()));
    };
    let digest = field(take_line(&mut buf)?, "sha256")?.to_string();
    if !take_line(&mut buf)?.is_empty() {
        return Err(Error::Format("missing blank line after header".into()));
    }
    if hex::encode(Sha256::digest(buf)) != digest {
        return Err(Error::Checksum);
    }
    let limits = Limits {
        mem_bytes,
        exact_bytes,
        scan_letters,
    };
    let mut st = ConstructionState::new(alphabet, growth, strategy, limits);
    st.levels.clear();
    for n in 0..=depth {
        let line = take_line(&mut buf)?;
        let parts: Vec<&str> = line.split(' ').collect();
        if parts.len() < 5 || parts[0] != "level" || num::<usize>(parts[1])? != n {
            return Err(Error::Format(format!("bad level line {line:?}")));
        }
        let c_size: BigUint = num(parts[2])?;
        let w_size: BigUint = num(parts[3])?;
        let c = match (parts[4], parts.len()) {
            ("top", 5) if n == depth => None,
            ("explicit", 6) => {
                let count: usize = num(parts[5])?;
                let bytes = count * (n + 1) * 4;
                if buf.len() < bytes {
                    return Err(Error::Format(format!("level {n} is truncated")));
                }
                let codes = buf[..bytes]
                    .chunks_exact(4)
                    .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
                    .collect();
                buf = &buf[bytes..];
                Some(CSet::Explicit(codes))
            }
            ("segment", 7) => Some(CSet::Segment {
                count: num(parts[5])?,
                exclude: if parts[6] == "-" { None } else { Some(num(parts[6])?) },
            }),
            _ => return Err(Error::Format(format!("bad level line {line:?}"))),
        };
        st.levels.push(Level { n, c_size, w_size, c });
    }
    if !buf.is_empty() {
        return Err(Error::Format("trailing bytes after the last level".into()));
    }
    st.refresh_cache();
    Ok(st)
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn save(st: &ConstructionState, path: &Path) -> Result<()> {
    write_atomic(path, &to_bytes(st))
}

pub fn load(path: &Path) -> Result<ConstructionState> {
    from_bytes(&fs::read(path)?)
}

/// Text listing of level `n`: a `C` line (absent at the top) and a `W` line,
/// words comma separated. Levels with more than `max_words` words are refused.
pub fn dump_level(st: &ConstructionState, n: usize, max_words: usize) -> Result<String> {
    if n > st.depth() {
        return Err(Error::Invalid(format!("level {n} is above depth {}", st.depth())));
    }
    if st.level(n).w_size > BigUint::from(max_words) {
        return Err(Error::Capacity(format!("level {n} has {} words", st.level(n).w_size)));
    }
    let join = |v: Vec<Vec<u8>>| v.iter().map(|w| render(w)).collect::<Vec<_>>().join(",");
    let mut s = format!("level {n}\n");
    if n < st.depth() {
        s.push_str(&format!("C {}\n", join(st.c_words(n)?)));
    }
    s.push_str(&format!("W {}\n", join(st.w_words(n)?)));
    Ok(s)
}

/// Reads back the `C` and `W` word lists of a [`dump_level`] listing.
pub fn parse_dump(text: &str) -> Result<(Option<Vec<Vec<u8>>>, Vec<Vec<u8>>)> {
    let mut c = None;
    let mut w = None;
    let words = |s: &str| -> Vec<Vec<u8>> {
        s.split(',').filter(|x| !x.is_empty()).map(|x| x.bytes().map(|b| b - b'a').collect()).collect()
    };
    for line in text.lines() {
        if let Some(r) = line.strip_prefix("C ") {
            c = Some(words(r));
        } else if let Some(r) = line.strip_prefix("W ") {
            w = Some(words(r));
        }
    }
    Ok((c, w.ok_or_else(|| Error::Format("no W line".into()))?))
}
