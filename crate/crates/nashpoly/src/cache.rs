//! On-disk start-system library.
//!
//! One JSON file per format and matrix holds the matrix and the exact
//! roots of every prepared support, so that the roots need only be
//! enumerated once per format. Roots are verified exactly when loaded.

use std::path::{Path, PathBuf};

use nashpoly_core::exact;
use nashpoly_core::nash::PreparedStart;
use nashpoly_core::{GameFormat, Injection, StartLibrary, Support, TNMatrix};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{read_file, write_file, Error, Result};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "NASHPOLY_CACHE";

const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CachedSupport {
    strategies: Vec<Vec<usize>>,
    roots: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    dims: Vec<usize>,
    injection: Option<String>,
    matrix: Vec<Vec<String>>,
    supports: Vec<CachedSupport>,
}

/// Default cache directory from the environment, if set.
pub fn default_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// File name for a format and injection; three players with two
/// strategies each under powers of two give `3_2-2-2_pow2.json`.
pub fn file_name(format: &GameFormat, injection: Injection) -> String {
    let counts: Vec<String> = (0..format.players()).map(|p| format.strategies(p).to_string()).collect();
    format!("{}_{}_{}.json", format.players(), counts.join("-"), injection.name())
}

fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n = n.trim().parse().map_err(|_| Error::Cache(format!("bad rational {s:?}")))?;
    let d: num_bigint::BigInt = d.trim().parse().map_err(|_| Error::Cache(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Cache(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

fn injection_from_name(name: &str) -> Result<Injection> {
    [Injection::PowersOfTwo, Injection::Successor]
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| Error::Cache(format!("unknown injection {name:?}")))
}

/// Serialises every prepared support of `library` with exact roots.
pub fn render(library: &StartLibrary) -> Result<String> {
    let supports = library
        .supports()
        .map(|(support, _)| {
            let roots = library.restricted(support)?.roots()?;
            Ok(CachedSupport {
                strategies: (0..support.players()).map(|p| support.strategies(p).to_vec()).collect(),
                roots: roots.iter().map(|r| r.iter().map(rational_string).collect()).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let file = CacheFile {
        version: VERSION,
        dims: library.format().dims().to_vec(),
        injection: library.matrix().injection().map(|f| f.name().to_string()),
        matrix: library
            .matrix()
            .entries()
            .iter()
            .map(|r| r.iter().map(rational_string).collect())
            .collect(),
        supports,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Rebuilds a library, checking that every cached root solves its start
/// system exactly and that each support carries its full root count.
pub fn parse(text: &str) -> Result<StartLibrary> {
    let file: CacheFile = serde_json::from_str(text)?;
    if file.version != VERSION {
        return Err(Error::Cache(format!("unsupported version {}", file.version)));
    }
    let format = GameFormat::new(file.dims)?;
    let entries = file
        .matrix
        .iter()
        .map(|r| r.iter().map(|s| parse_rational(s)).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    let matrix = match &file.injection {
        Some(name) => {
            let m = TNMatrix::for_format(&format, injection_from_name(name)?);
            if m.entries() != entries.as_slice() {
                return Err(Error::Cache("matrix does not match its injection".into()));
            }
            m
        }
        None => TNMatrix::from_entries(entries)?,
    };
    let mut library = StartLibrary::from_matrix(&format, matrix)?;
    for cached in file.supports {
        let support = Support::new(&format, cached.strategies)?;
        let start = library.restricted(&support)?;
        let system = start.expanded_exact();
        let expected = start.bernstein_number();
        if num_bigint::BigUint::from(cached.roots.len()) != expected {
            return Err(Error::Cache(format!(
                "support {support:?} has {} roots, expected {expected}",
                cached.roots.len()
            )));
        }
        let mut roots = Vec::with_capacity(cached.roots.len());
        for root in &cached.roots {
            let point = root.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
            let values = system.evaluate(&point)?;
            if values.iter().any(|v| !v.is_zero()) {
                return Err(Error::Cache(format!("a cached root of {support:?} is not a root")));
            }
            roots.push(exact::to_complex(&point));
        }
        if roots.iter().enumerate().any(|(i, r)| roots[..i].contains(r)) {
            return Err(Error::Cache(format!("support {support:?} repeats a root")));
        }
        library.insert(
            support,
            PreparedStart {
                system: start.expanded(),
                roots,
            },
        );
    }
    Ok(library)
}

pub fn save(library: &StartLibrary, dir: &Path, injection: Injection) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(file_name(library.format(), injection));
    write_file(&path, &render(library)?)?;
    Ok(path)
}

/// The cached library for `format`, or `None` when no file exists.
pub fn load(dir: &Path, format: &GameFormat, injection: Injection) -> Result<Option<StartLibrary>> {
    let path = dir.join(file_name(format, injection));
    if !path.exists() {
        return Ok(None);
    }
    let library = parse(&read_file(&path)?)?;
    if library.format() != format {
        return Err(Error::Cache(format!("{} holds a different format", path.display())));
    }
    Ok(Some(library))
}
