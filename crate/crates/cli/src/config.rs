//! JSON schemas for quivers, structure data and suite configurations.

use anyhow::{anyhow, bail, Context, Result};
use ncforge_core::dr::DrBudget;
use ncforge_core::expr;
use ncforge_core::fusion::Invertible;
use ncforge_core::presentation::{self, Presentation};
use ncforge_core::quiver::{self, Arrow, DimensionVector, Quiver};
use ncforge_core::structures::{BisymplecticData, Budgets, QuasiBisymplecticData};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverFile {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    #[serde(default)]
    pub structure: Option<StructureSpec>,
    #[serde(default)]
    pub fusion_plan: Option<Vec<(String, String)>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub id: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub kind: String,
    pub omega: String,
    #[serde(default)]
    pub moments: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub phi: Option<BTreeMap<String, (String, String)>>,
    #[serde(default)]
    pub polyvector: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    #[serde(default)]
    pub quiver: Option<String>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub cases: Option<usize>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub dims: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub budgets: Option<BudgetSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    #[serde(default)]
    pub rewrite_steps: Option<usize>,
    #[serde(default)]
    pub dr_depth: Option<usize>,
    #[serde(default)]
    pub dr_monomials: Option<usize>,
    #[serde(default)]
    pub kappa_span: Option<usize>,
}

impl BudgetSpec {
    pub fn to_budgets(&self) -> Budgets {
        let def = Budgets::default();
        Budgets {
            dr: DrBudget {
                depth: self.dr_depth.unwrap_or(def.dr.depth),
                max_monomials: self.dr_monomials.unwrap_or(def.dr.max_monomials),
            },
            kappa_span: self.kappa_span.unwrap_or(def.kappa_span),
            rewrite_steps: self.rewrite_steps.unwrap_or(def.rewrite_steps),
        }
    }
}

pub fn load_quiver_file(path: &Path) -> Result<QuiverFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let file: QuiverFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(file)
}

pub fn quiver_from_file(file: &QuiverFile) -> Result<Quiver> {
    Quiver::new(
        file.vertices.clone(),
        file.arrows
            .iter()
            .map(|a| Arrow { id: a.id.clone(), src: a.src.clone(), dst: a.dst.clone() })
            .collect(),
    )
    .map_err(|e| anyhow!("invalid quiver: {e}"))
}

/// Resolve a quiver reference: a builtin name or a JSON file path.
pub fn resolve_quiver(reference: &str) -> Result<(Quiver, Option<QuiverFile>)> {
    match reference {
        "loop" | "builtin:loop" => Ok((Quiver::loop_quiver(), None)),
        "a2" | "builtin:a2" => Ok((Quiver::a2(), None)),
        "two_loop" | "builtin:two_loop" => Ok((Quiver::two_loop(), None)),
        path => {
            let file = load_quiver_file(Path::new(path))?;
            let q = quiver_from_file(&file)?;
            Ok((q, Some(file)))
        }
    }
}

fn parse_element(p: &Presentation, text: &str) -> Result<ncforge_core::Element> {
    let v = expr::parse_eval(p, text).map_err(|e| anyhow!("in `{text}`: {e}"))?;
    v.into_element().map_err(|e| anyhow!("in `{text}`: expected an algebra element ({e})"))
}

/// Build user-specified additive structure data over the double of `q`.
pub fn additive_structure_from_spec(
    q: &Quiver,
    spec: &StructureSpec,
) -> Result<BisymplecticData> {
    if spec.kind != "additive" {
        bail!("structure kind must be `additive`");
    }
    let p = presentation::path_algebra(&quiver::double(q).quiver);
    let omega = expr::parse_eval(&p, &spec.omega)
        .map_err(|e| anyhow!("omega: {e}"))?
        .into_form()
        .map_err(|e| anyhow!("omega: {e}"))?;
    if omega.weight != 2 {
        bail!("omega must have weight 2");
    }
    let mut moments = BTreeMap::new();
    let spec_moments =
        spec.moments.as_ref().ok_or_else(|| anyhow!("additive structure needs `moments`"))?;
    for (v, text) in spec_moments {
        let idx = p.vertex_index(v).map_err(|e| anyhow!("{e}"))?;
        moments.insert(idx, parse_element(&p, text)?);
    }
    Ok(BisymplecticData { presentation: p, omega, moments })
}

/// Build user-specified multiplicative structure data over the localized
/// double of `q`.
pub fn multiplicative_structure_from_spec(
    q: &Quiver,
    spec: &StructureSpec,
) -> Result<QuasiBisymplecticData> {
    if spec.kind != "multiplicative" {
        bail!("structure kind must be `multiplicative`");
    }
    let p = presentation::double_localized(&quiver::double(q));
    let omega = expr::parse_eval(&p, &spec.omega)
        .map_err(|e| anyhow!("omega: {e}"))?
        .into_form()
        .map_err(|e| anyhow!("omega: {e}"))?;
    if omega.weight != 2 {
        bail!("omega must have weight 2");
    }
    let mut phi = BTreeMap::new();
    let spec_phi =
        spec.phi.as_ref().ok_or_else(|| anyhow!("multiplicative structure needs `phi`"))?;
    for (v, (elt, inv)) in spec_phi {
        let idx = p.vertex_index(v).map_err(|e| anyhow!("{e}"))?;
        phi.insert(
            idx,
            Invertible { elt: parse_element(&p, elt)?, inv: parse_element(&p, inv)? },
        );
    }
    let polyvector = match &spec.polyvector {
        Some(text) => Some(
            expr::parse_eval(&p, text)
                .map_err(|e| anyhow!("polyvector: {e}"))?
                .into_poly()
                .map_err(|e| anyhow!("polyvector: {e}"))?,
        ),
        None => None,
    };
    Ok(QuasiBisymplecticData { presentation: p, omega, phi, polyvector })
}

/// Translate per-original-vertex dimensions to the folded presentation of
/// the separated structure: each original vertex keeps exactly one copy.
pub fn folded_dims(q: &Quiver, dims: &[usize]) -> Result<DimensionVector> {
    if dims.len() != q.vertices.len() {
        bail!("expected {} dimensions, got {}", q.vertices.len(), dims.len());
    }
    let sep = quiver::separate(q);
    let mut merged: BTreeMap<String, String> = BTreeMap::new();
    for (kept, merged_v) in &sep.plan {
        merged.insert(merged_v.clone(), kept.clone());
    }
    // The kept copy of an original vertex is the first copy in its group;
    // recover it by following the arrows.
    let mut out = BTreeMap::new();
    for (i, v) in q.vertices.iter().enumerate() {
        // Any copy of v, chased through the merge map, lands on the kept one.
        let mut copy = None;
        for a in &q.arrows {
            if &a.src == v {
                copy = Some(format!("v_{}", a.id));
                break;
            }
            if &a.dst == v {
                copy = Some(format!("v_{}*", a.id));
                break;
            }
        }
        let mut name = copy.ok_or_else(|| anyhow!("vertex {v} has no incident arrows"))?;
        while let Some(next) = merged.get(&name) {
            name = next.clone();
        }
        out.insert(name, dims[i]);
    }
    Ok(DimensionVector(out))
}
