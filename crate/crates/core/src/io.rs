//! Plain-text interchange formats.
//!
//! Every file starts with `#` header lines of `key=value` fields. Family files
//! carry a `hash=` field, a truncated SHA-256 of the header and body, that
//! downstream files echo as `family_hash=`.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::families::{CircleFamily, FamilyError, Provenance};
use crate::geometry::{Aabb3, Circle3};
use crate::incidence::TangencyPairSet;
use crate::planks::{PlankCollection, RichnessHistogram};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("file contains no points")]
    Empty,
    #[error("hash mismatch: header says {stated}, content hashes to {actual}")]
    HashMismatch { stated: String, actual: String },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

/// First 16 hex digits of the SHA-256 of `data`.
pub fn short_hash(data: &[u8]) -> String {
    let digest = Sha256::digest(data);
    digest.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn fmt_box(b: &Aabb3) -> String {
    format!(
        "{},{},{},{},{},{}",
        b.min[0], b.min[1], b.min[2], b.max[0], b.max[1], b.max[2]
    )
}

fn parse_box(s: &str, line: usize) -> Result<Aabb3, FormatError> {
    let v: Result<Vec<f64>, _> = s.split(',').map(str::parse).collect();
    match v {
        Ok(v) if v.len() == 6 => Ok(Aabb3::new([v[0], v[1], v[2]], [v[3], v[4], v[5]])),
        _ => Err(parse_err(line, format!("bad box {s:?}"))),
    }
}

fn family_content(x: &CircleFamily) -> String {
    let prov = x.provenance();
    let get = |k: &str| prov.param(k).unwrap_or("-").to_string();
    let mut out = format!(
        "# generator={} R={} rho={} eps={} seed={}",
        prov.generator,
        x.scale(),
        x.separation(),
        get("eps"),
        prov.seed.map_or("-".to_string(), |s| s.to_string())
    );
    for (k, v) in &prov.params {
        if !matches!(k.as_str(), "R" | "rho" | "eps") {
            let _ = write!(out, " {k}={v}");
        }
    }
    let _ = writeln!(
        out,
        "\n# box={} integer={} separated={}",
        fmt_box(&x.bbox()),
        x.is_integer(),
        x.is_declared_separated()
    );
    for c in x.points() {
        let _ = writeln!(out, "{} {} {}", c.center[0], c.center[1], c.radius);
    }
    out
}

/// Provenance hash of a family: the hash of its serialized content.
pub fn family_hash(x: &CircleFamily) -> String {
    short_hash(family_content(x).as_bytes())
}

pub fn write_family(x: &CircleFamily) -> String {
    let content = family_content(x);
    let hash = short_hash(content.as_bytes());
    let split = content.find('\n').map_or(content.len(), |i| i + 1);
    let split = split + content[split..].find('\n').map_or(0, |i| i + 1);
    format!("{}# hash={hash}\n{}", &content[..split], &content[split..])
}

fn header_fields(line: &str) -> impl Iterator<Item = (&str, &str)> {
    line.trim_start_matches('#')
        .split_whitespace()
        .filter_map(|f| f.split_once('='))
}

/// Parses a family file, checking its hash if present.
pub fn read_family(text: &str) -> Result<CircleFamily, FormatError> {
    let mut prov = Provenance::default();
    let mut scale = None;
    let mut rho = None;
    let mut bbox = None;
    let mut separated = false;
    let mut stated_hash = None;
    let mut content = String::new();
    let mut points = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            let mut is_hash = false;
            for (k, v) in header_fields(t) {
                match k {
                    "hash" => {
                        stated_hash = Some(v.to_string());
                        is_hash = true;
                    }
                    "generator" => prov.generator = v.to_string(),
                    "seed" if v != "-" => {
                        prov.seed = Some(v.parse().map_err(|_| parse_err(line, "bad seed"))?)
                    }
                    "R" => {
                        scale = Some(v.parse::<f64>().map_err(|_| parse_err(line, "bad R"))?);
                        prov.params.push((k.into(), v.into()));
                    }
                    "rho" => {
                        rho = Some(v.parse::<f64>().map_err(|_| parse_err(line, "bad rho"))?);
                        prov.params.push((k.into(), v.into()));
                    }
                    "box" => bbox = Some(parse_box(v, line)?),
                    "separated" => separated = v == "true",
                    "integer" | "seed" => {}
                    "eps" if v == "-" => {}
                    _ => prov.params.push((k.into(), v.into())),
                }
            }
            if !is_hash {
                content.push_str(raw);
                content.push('\n');
            }
            continue;
        }
        let v: Result<Vec<f64>, _> = t.split_whitespace().map(str::parse::<f64>).collect();
        match v {
            Ok(v) if v.len() == 3 && v.iter().all(|c| c.is_finite()) => {
                points.push(Circle3::new(v[0], v[1], v[2]));
                content.push_str(raw);
                content.push('\n');
            }
            _ => return Err(parse_err(line, format!("expected three numbers, got {t:?}"))),
        }
    }
    if points.is_empty() {
        return Err(FormatError::Empty);
    }
    if let Some(stated) = stated_hash {
        let actual = short_hash(content.as_bytes());
        if stated != actual {
            return Err(FormatError::HashMismatch { stated, actual });
        }
    }
    let bbox = bbox.unwrap_or_else(|| {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for c in &points {
            let p = c.point();
            for i in 0..3 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        Aabb3::new(lo, hi)
    });
    let scale = scale.unwrap_or_else(|| bbox.half_extents().iter().fold(0.0_f64, |m, &v| m.max(2.0 * v)).max(1.0));
    let fam = CircleFamily::new(points, scale, rho.unwrap_or(1.0), bbox, prov)?;
    Ok(if separated { fam.declare_separated() } else { fam })
}

/// `i j dist delta_gap` rows.
pub fn write_pairs(pairs: &TangencyPairSet, x: &CircleFamily) -> String {
    let mut out = format!(
        "# family_hash={} delta={} pairs={}\n",
        family_hash(x),
        pairs.delta,
        pairs.len()
    );
    let pts = x.points();
    if let Some(b) = &pairs.by_distance {
        let sizes: Vec<String> = b.iter().map(|(k, v)| format!("{k}:{}", v.len())).collect();
        let _ = writeln!(out, "# buckets={}", sizes.join(","));
    }
    for &(i, j) in &pairs.pairs {
        let (a, b) = (&pts[i as usize], &pts[j as usize]);
        let _ = writeln!(out, "{i} {j} {} {}", a.distance(b), crate::geometry::delta_gap(a, b));
    }
    out
}

/// Reads the index pairs of a pair file.
pub fn read_pairs(text: &str) -> Result<(Option<String>, Vec<(u32, u32)>), FormatError> {
    let mut hash = None;
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            for (k, v) in header_fields(t) {
                if k == "family_hash" {
                    hash = Some(v.to_string());
                }
            }
            continue;
        }
        let mut it = t.split_whitespace();
        let (Some(i), Some(j)) = (it.next(), it.next()) else {
            return Err(parse_err(n + 1, "expected i j"));
        };
        let i = i.parse().map_err(|_| parse_err(n + 1, "bad index"))?;
        let j = j.parse().map_err(|_| parse_err(n + 1, "bad index"))?;
        pairs.push((i, j));
    }
    Ok((hash, pairs))
}

/// `theta v1 v2 v3 A B` rows.
pub fn write_collection(c: &PlankCollection) -> String {
    let (a, b) = c.dims();
    let mut out = format!(
        "# K={} S={} A={a} B={b} box={} planks={} maximal={}\n",
        c.k(),
        c.s(),
        fmt_box(&c.bbox()),
        c.len(),
        c.is_maximal()
    );
    for p in c.planks() {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {}",
            p.theta(),
            p.center[0],
            p.center[1],
            p.center[2],
            p.a_len,
            p.b_len
        );
    }
    out
}

pub fn read_collection(text: &str) -> Result<PlankCollection, FormatError> {
    let mut k = 1.0;
    let mut bbox = None;
    let mut planks = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            for (key, v) in header_fields(t) {
                match key {
                    "K" => k = v.parse().map_err(|_| parse_err(line, "bad K"))?,
                    "box" => bbox = Some(parse_box(v, line)?),
                    _ => {}
                }
            }
            continue;
        }
        let v: Result<Vec<f64>, _> = t.split_whitespace().map(str::parse::<f64>).collect();
        match v {
            Ok(v) if v.len() == 6 => {
                planks.push(crate::geometry::Lightplank::new(v[0], [v[1], v[2], v[3]], v[4], v[5]))
            }
            _ => return Err(parse_err(line, "expected theta v1 v2 v3 A B")),
        }
    }
    let bbox = bbox.ok_or_else(|| parse_err(1, "missing box header"))?;
    PlankCollection::from_planks(planks, k, bbox).map_err(|e| parse_err(1, e.to_string()))
}

/// `mu count_planks` rows.
pub fn write_richness(h: &RichnessHistogram, family_hash: &str) -> String {
    let mut out = format!("# family_hash={family_hash}\n");
    for (mu, n) in h.bucket_sizes() {
        let _ = writeln!(out, "{mu} {n}");
    }
    out
}
