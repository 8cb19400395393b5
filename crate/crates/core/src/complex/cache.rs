//! On-disk cache of built complexes.
//!
//! One file per component and truncation degree. The file has two lines.
//! The first is a JSON header:
//!
//! ```text
//! {"format_version":1,"flavor":"unpar-unen","g":0,"m":3,"top_degree":4,
//!  "exact_through":4,"counts":[1,4,7,6,2],"sha256":"<hex of line 2>"}
//! ```
//!
//! The second is the JSON payload `{"bases":[[text,…],…],"boundaries":[[[row,col,value],…],…]}`
//! with cells in canonical text form and each boundary matrix `∂_k` as
//! triplets. A load verifies the version and checksum before parsing and
//! returns an error rather than a partial complex.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{build_complex, BuildOptions, ChainComplex, ComplexError, Component};
use crate::diagram::{Diagram, Flavor};
use crate::homology::sparse::SparseMatrix;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format_version: u32,
    flavor: String,
    g: usize,
    m: usize,
    top_degree: usize,
    exact_through: usize,
    counts: Vec<usize>,
    sha256: String,
}

#[derive(Serialize, Deserialize)]
struct Payload {
    bases: Vec<Vec<String>>,
    boundaries: Vec<Vec<(usize, usize, i64)>>,
}

/// Whether [`load_or_build`] read the file or enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Miss,
}

/// File name for a component, optionally truncated.
pub fn file_name(c: Component, max_degree: Option<usize>) -> String {
    match max_degree {
        Some(d) => format!("{}_g{}_m{}_d{}.json", c.flavor.tag(), c.g, c.m, d),
        None => format!("{}_g{}_m{}.json", c.flavor.tag(), c.g, c.m),
    }
}

fn err(msg: impl Into<String>) -> ComplexError {
    ComplexError::Cache(msg.into())
}

pub fn store(c: &ChainComplex, path: &Path) -> Result<(), ComplexError> {
    let payload = Payload {
        bases: c.bases().iter().map(|b| b.iter().map(Diagram::to_text).collect()).collect(),
        boundaries: c.boundaries().iter().map(SparseMatrix::triplets).collect(),
    };
    let body = serde_json::to_string(&payload).map_err(|e| err(e.to_string()))?;
    let header = Header {
        format_version: FORMAT_VERSION,
        flavor: c.component.flavor.tag().to_string(),
        g: c.component.g,
        m: c.component.m,
        top_degree: c.len().saturating_sub(1),
        exact_through: c.exact_through(),
        counts: c.counts(),
        sha256: hex_digest(body.as_bytes()),
    };
    let head = serde_json::to_string(&header).map_err(|e| err(e.to_string()))?;
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| err(format!("{}: {e}", dir.display())))?;
    }
    let tmp = path.with_extension("json.tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| err(format!("{}: {e}", tmp.display())))?;
    writeln!(f, "{head}\n{body}").map_err(|e| err(e.to_string()))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| err(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<ChainComplex, ComplexError> {
    let text = fs::read_to_string(path).map_err(|e| err(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| err("empty cache file"))?;
    let body = lines.next().ok_or_else(|| err("cache file has no payload"))?;
    let header: Header = serde_json::from_str(head).map_err(|e| err(format!("bad header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(err(format!("format version {} (expected {FORMAT_VERSION})", header.format_version)));
    }
    if hex_digest(body.as_bytes()) != header.sha256 {
        return Err(err("checksum mismatch"));
    }
    let flavor: Flavor = header.flavor.parse().map_err(|_| err("bad flavor in header"))?;
    let payload: Payload = serde_json::from_str(body).map_err(|e| err(format!("bad payload: {e}")))?;
    let bases = payload
        .bases
        .iter()
        .map(|b| b.iter().map(|t| Diagram::parse(t)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    if bases.iter().map(Vec::len).collect::<Vec<_>>() != header.counts {
        return Err(err("cell counts disagree with header"));
    }
    let boundaries = payload
        .boundaries
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let rows = if k == 0 { 0 } else { bases[k - 1].len() };
            let cols = bases.get(k).map_or(0, Vec::len);
            if t.iter().any(|&(r, c, _)| r >= rows || c >= cols) {
                return Err(err(format!("matrix entry out of range in degree {k}")));
            }
            Ok(SparseMatrix::from_triplets(rows, cols, t))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let component = Component::new(flavor, header.g, header.m);
    ChainComplex::from_parts(component, bases, boundaries, header.exact_through)
}

/// Loads the component from `dir` if present, otherwise builds and stores it.
pub fn load_or_build(
    dir: &Path,
    c: Component,
    opts: BuildOptions,
) -> Result<(ChainComplex, CacheOutcome), ComplexError> {
    let path: PathBuf = dir.join(file_name(c, opts.max_degree));
    if path.exists() {
        let cx = load(&path)?;
        if cx.component != c {
            return Err(err("cached component differs from request"));
        }
        return Ok((cx, CacheOutcome::Hit));
    }
    let cx = build_complex(c, opts)?;
    store(&cx, &path)?;
    Ok((cx, CacheOutcome::Miss))
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
