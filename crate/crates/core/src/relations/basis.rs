use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fock::{Leg, Legs, Monomial};
use crate::freefield::FreeFieldSpec;
use crate::orbifold::Sector;

/// All canonical monomials of one weight in one sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightBasis {
    pub weight2x: u32,
    pub sector: Sector,
    pub monomials: Vec<Monomial>,
}

impl WeightBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

fn enumerate(spec: &FreeFieldSpec, left: u32, last: Option<Leg>, cur: &mut Legs, out: &mut Vec<Monomial>) {
    if left == 0 {
        out.push(Monomial::canonical(spec, cur.iter().copied()).expect("distinct odd legs").0);
        return;
    }
    let start = last.map_or(0, |l| l.gen as usize);
    for g in start..spec.len() {
        let wg = spec.weight2x(g);
        if wg > left {
            continue;
        }
        let max_der = ((left - wg) / 2) as u16;
        let cap = match last {
            Some(l) if l.gen as usize == g => {
                if spec.is_odd(g) {
                    if l.der == 0 {
                        continue;
                    }
                    l.der - 1
                } else {
                    l.der
                }
            }
            _ => max_der,
        };
        for der in (0..=cap.min(max_der)).rev() {
            let leg = Leg::new(g, der);
            let w = wg + 2 * der as u32;
            cur.push(leg);
            enumerate(spec, left - w, Some(leg), cur, out);
            cur.pop();
        }
    }
}

pub fn weight_basis(spec: &FreeFieldSpec, weight2x: u32, sector: Sector) -> WeightBasis {
    let mut out = Vec::new();
    enumerate(spec, weight2x, None, &mut Legs::new(), &mut out);
    out.retain(|m| sector.admits(m.z2sign(spec)));
    out.sort();
    WeightBasis { weight2x, sector, monomials: out }
}

#[derive(Serialize, Deserialize)]
struct CachedBasis {
    schema: String,
    spec_hash: String,
    weight2x: u32,
    sector: Sector,
    monomials: Vec<Vec<(u16, u16)>>,
}

/// One JSON file per (algebra hash, weight, sector).
#[derive(Debug, Clone)]
pub struct BasisCache {
    dir: PathBuf,
}

impl BasisCache {
    pub fn new(dir: impl AsRef<Path>) -> std::io::Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(BasisCache { dir: dir.as_ref().to_path_buf() })
    }

    fn path(&self, hash: &str, weight2x: u32, sector: Sector) -> PathBuf {
        self.dir.join(format!("basis-{}-{}-{}.json", &hash[..16], weight2x, sector.name()))
    }

    pub fn load(&self, spec: &FreeFieldSpec, weight2x: u32, sector: Sector) -> Option<WeightBasis> {
        let hash = spec.hash();
        let text = fs::read_to_string(self.path(&hash, weight2x, sector)).ok()?;
        let c: CachedBasis = serde_json::from_str(&text).ok()?;
        if c.schema != "1" || c.spec_hash != hash || c.weight2x != weight2x || c.sector != sector {
            return None;
        }
        let monomials = c
            .monomials
            .into_iter()
            .map(|legs| Monomial::canonical(spec, legs.into_iter().map(|(g, d)| Leg { gen: g, der: d })).map(|x| x.0))
            .collect::<Option<Vec<_>>>()?;
        Some(WeightBasis { weight2x, sector, monomials })
    }

    pub fn store(&self, spec: &FreeFieldSpec, b: &WeightBasis) -> std::io::Result<()> {
        let hash = spec.hash();
        let c = CachedBasis {
            schema: "1".into(),
            spec_hash: hash.clone(),
            weight2x: b.weight2x,
            sector: b.sector,
            monomials: b.monomials.iter().map(|m| m.legs().iter().map(|l| (l.gen, l.der)).collect()).collect(),
        };
        let tmp = self.path(&hash, b.weight2x, b.sector).with_extension("tmp");
        fs::write(&tmp, serde_json::to_string(&c)?)?;
        fs::rename(tmp, self.path(&hash, b.weight2x, b.sector))
    }

    pub fn weight_basis(&self, spec: &FreeFieldSpec, weight2x: u32, sector: Sector) -> WeightBasis {
        if let Some(b) = self.load(spec, weight2x, sector) {
            return b;
        }
        let b = weight_basis(spec, weight2x, sector);
        let _ = self.store(spec, &b);
        b
    }
}

/// Basis lookup through an optional cache.
pub fn basis_with(cache: Option<&BasisCache>, spec: &FreeFieldSpec, weight2x: u32, sector: Sector) -> WeightBasis {
    match cache {
        Some(c) => c.weight_basis(spec, weight2x, sector),
        None => weight_basis(spec, weight2x, sector),
    }
}
