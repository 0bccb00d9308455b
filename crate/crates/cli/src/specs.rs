//! Parsing of the group, cocycle and space arguments.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, ensure, Context, Result};
use dwtft::cochain::{cochain_from_json, cyclic_cocycle_on, restrict, zero_cochain, Cochain};
use dwtft::complex::{circle, product_with_circle, sphere2, surface, torus_grid, DeltaComplex};
use dwtft::group::{builtin_group, group_from_json, make_cyclic, FiniteGroup, GroupHom};
use serde::Deserialize;

/// A built-in name, or a path to a group file.
pub fn resolve_group(spec: &str) -> Result<Arc<FiniteGroup>> {
    let path = Path::new(spec);
    let group = if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        group_from_json(&text).with_context(|| format!("group file {spec}"))?
    } else {
        builtin_group(spec).with_context(|| format!("group {spec:?}"))?
    };
    Ok(Arc::new(group))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CocycleSpec {
    Trivial,
    Cyclic { k: usize, p: i64 },
    Inflate(PathBuf),
    File(PathBuf),
}

#[derive(Deserialize)]
struct InflateFile {
    modulus: usize,
    level: i64,
    images: Vec<usize>,
}

impl CocycleSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "trivial" {
            return Ok(CocycleSpec::Trivial);
        }
        if let Some(rest) = s.strip_prefix("cyclic:") {
            let (k, p) = rest.split_once(':').ok_or_else(|| anyhow!("expected cyclic:k:p, got {s:?}"))?;
            return Ok(CocycleSpec::Cyclic { k: k.parse().context("cyclic modulus")?, p: p.parse().context("cyclic level")? });
        }
        if let Some(file) = s.strip_prefix("inflate:") {
            return Ok(CocycleSpec::Inflate(file.into()));
        }
        ensure!(Path::new(s).is_file(), "cocycle {s:?} is neither a known form nor an existing file");
        Ok(CocycleSpec::File(s.into()))
    }

    /// A validated cocycle of the requested degree on `group`.
    pub fn resolve(&self, group: &Arc<FiniteGroup>, degree: usize) -> Result<Cochain> {
        let c = match self {
            CocycleSpec::Trivial => zero_cochain(group.clone(), degree)?,
            CocycleSpec::Cyclic { k, p } => {
                ensure!(degree == 3, "cyclic cocycles have degree 3, this computation needs degree {degree}");
                cyclic_cocycle_on(group.clone(), *k, *p)?
            }
            CocycleSpec::Inflate(path) => {
                ensure!(degree == 3, "inflated cyclic cocycles have degree 3, this computation needs degree {degree}");
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let file: InflateFile = serde_json::from_str(&text).with_context(|| format!("inflate file {}", path.display()))?;
                let target = Arc::new(make_cyclic(file.modulus)?);
                let hom = GroupHom::new(group.clone(), target.clone(), file.images)?;
                restrict(&cyclic_cocycle_on(target, file.modulus, file.level)?, &hom)?
            }
            CocycleSpec::File(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let c = cochain_from_json(&text, group.clone(), false).with_context(|| format!("cocycle file {}", path.display()))?;
                ensure!(c.degree() == degree, "cocycle file has degree {}, this computation needs degree {degree}", c.degree());
                c
            }
        };
        c.require_cocycle()?;
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceSpec {
    Circle(usize),
    Sphere,
    Surface(usize),
    TorusGrid(usize, usize),
    File(PathBuf),
    TimesCircle(Box<SpaceSpec>),
    Union(Vec<SpaceSpec>),
}

fn positive(s: &str, what: &str) -> Result<usize> {
    let n: usize = s.trim().parse().with_context(|| format!("{what} {s:?}"))?;
    ensure!(n >= 1, "{what} must be at least 1");
    Ok(n)
}

impl SpaceSpec {
    /// `circle:m | sphere | surface:h | torusgrid:p:q | FILE`, optionally
    /// followed by `x S1` factors, with `+` for disjoint unions.
    pub fn parse(s: &str) -> Result<Self> {
        let terms: Vec<&str> = s.split('+').map(str::trim).collect();
        if terms.len() > 1 {
            return Ok(SpaceSpec::Union(terms.into_iter().map(Self::parse_term).collect::<Result<_>>()?));
        }
        Self::parse_term(terms[0])
    }

    fn parse_term(s: &str) -> Result<Self> {
        let mut factors = s.split(" x ").map(str::trim);
        let mut space = Self::parse_atom(factors.next().unwrap_or_default())?;
        for f in factors {
            ensure!(f.eq_ignore_ascii_case("S1"), "only products with S1 are supported, got factor {f:?}");
            space = SpaceSpec::TimesCircle(Box::new(space));
        }
        Ok(space)
    }

    fn parse_atom(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        Ok(match parts.as_slice() {
            ["circle", m] => SpaceSpec::Circle(positive(m, "circle vertex count")?),
            ["sphere"] => SpaceSpec::Sphere,
            ["surface", h] => SpaceSpec::Surface(positive(h, "genus")?),
            ["torusgrid", p, q] => SpaceSpec::TorusGrid(positive(p, "grid width")?, positive(q, "grid height")?),
            [one] if one.eq_ignore_ascii_case("S1") => SpaceSpec::Circle(1),
            _ if Path::new(s).is_file() => SpaceSpec::File(s.into()),
            _ => bail!("unrecognized space {s:?}"),
        })
    }

    pub fn build(&self) -> Result<DeltaComplex> {
        Ok(match self {
            SpaceSpec::Circle(m) => circle(*m),
            SpaceSpec::Sphere => sphere2(),
            SpaceSpec::Surface(h) => surface(*h),
            SpaceSpec::TorusGrid(p, q) => torus_grid(*p, *q),
            SpaceSpec::File(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                DeltaComplex::from_json(&text).with_context(|| format!("complex file {}", path.display()))?
            }
            SpaceSpec::TimesCircle(x) => product_with_circle(&x.build()?)?,
            SpaceSpec::Union(parts) => {
                let built = parts.iter().map(Self::build).collect::<Result<Vec<_>>>()?;
                let mut acc = DeltaComplex::empty(built[0].dim());
                for p in &built {
                    acc = DeltaComplex::disjoint_union(&acc, p)?;
                }
                acc
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spaces_parse() {
        assert_eq!(SpaceSpec::parse("circle:3").unwrap(), SpaceSpec::Circle(3));
        assert_eq!(SpaceSpec::parse("torusgrid:2:3").unwrap(), SpaceSpec::TorusGrid(2, 3));
        assert_eq!(
            SpaceSpec::parse("surface:2 x S1").unwrap(),
            SpaceSpec::TimesCircle(Box::new(SpaceSpec::Surface(2)))
        );
        let u = SpaceSpec::parse("sphere + surface:1").unwrap();
        assert_eq!(u, SpaceSpec::Union(vec![SpaceSpec::Sphere, SpaceSpec::Surface(1)]));
        assert_eq!(u.build().unwrap().components().len(), 2);
        assert_eq!(SpaceSpec::parse("S1 x S1 x S1").unwrap().build().unwrap().dim(), 3);
        for bad in ["circle:0", "torus", "surface:1 x sphere", "torusgrid:2", "circle:+ sphere"] {
            assert!(SpaceSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn cocycles_parse() {
        assert_eq!(CocycleSpec::parse("trivial").unwrap(), CocycleSpec::Trivial);
        assert_eq!(CocycleSpec::parse("cyclic:4:2").unwrap(), CocycleSpec::Cyclic { k: 4, p: 2 });
        assert!(CocycleSpec::parse("cyclic:4").is_err());
        assert!(CocycleSpec::parse("/no/such/file").is_err());
        let z4 = resolve_group("Z4").unwrap();
        assert!(CocycleSpec::Cyclic { k: 4, p: 1 }.resolve(&z4, 3).is_ok());
        assert!(CocycleSpec::Cyclic { k: 4, p: 1 }.resolve(&z4, 2).is_err());
        assert!(CocycleSpec::Cyclic { k: 3, p: 1 }.resolve(&z4, 3).is_err());
    }
}
