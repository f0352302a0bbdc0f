//! JSON model files. Rationals are strings `"p/q"`; unknown fields are rejected.
//!
//! A file describes a manifold either by its homology coalgebra (`basis`, `coproducts`,
//! `pairing`) or by a CDGA model (`cdga`), and optionally a principal bundle over it.
//! Coalgebra maps are written unshifted, `c_n: C → C^{⊗n}` of degree `n − 2`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::applications::{AppError, BundleModel, ManifoldModel};
use crate::connection_builder::{CdgaModel, ConnectionError};
use crate::graded_core::{format_q, parse_q, GradedError, GradedMap, GradedSpace, Lin, Q};
use crate::homotopy_structures::{FiniteFamily, Pairing, StructureError, StructureKind};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed model at `{path}`: {message}")]
    Syntax { path: String, message: String },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("model fails verification: {0}")]
    Verification(#[from] AppError),
}

impl ModelError {
    /// Input errors are problems with the file itself; verification errors are
    /// well-formed inputs whose structures fail a checker.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, ModelError::Verification(e) if is_verification(e))
    }
}

fn is_verification(e: &AppError) -> bool {
    use crate::homology_engine::HomologyError;
    use crate::twisted_builders::BuildError;
    matches!(
        e,
        AppError::Coalgebra { .. }
            | AppError::Homology(HomologyError::NotDerivation(_) | HomologyError::NotSquareZero(_))
            | AppError::NotPoincare(_)
            | AppError::Build(BuildError::MaurerCartan(_))
            | AppError::Connection(
                ConnectionError::NotFlat(_)
                    | ConnectionError::NotClosed { .. }
                    | ConnectionError::NotSquareZero(_)
            )
    )
}

impl From<GradedError> for ModelError {
    fn from(e: GradedError) -> Self {
        ModelError::Invalid(e.to_string())
    }
}

impl From<StructureError> for ModelError {
    fn from(e: StructureError) -> Self {
        ModelError::Invalid(e.to_string())
    }
}

impl From<ConnectionError> for ModelError {
    fn from(e: ConnectionError) -> Self {
        match e {
            ConnectionError::InvalidModel(m) => ModelError::Invalid(m),
            other => ModelError::Verification(AppError::Connection(other)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub name: String,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordTerm {
    pub word: Vec<String>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementTerm {
    pub element: String,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEntry {
    pub input: String,
    pub terms: Vec<WordTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoproductBlock {
    pub arity: usize,
    pub entries: Vec<MapEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingEntry {
    pub left: String,
    pub right: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    pub terms: Vec<ElementTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearEntry {
    pub element: String,
    pub terms: Vec<ElementTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedCombination {
    pub name: String,
    pub terms: Vec<ElementTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionEntry {
    pub exact: Vec<ElementTerm>,
    pub primitive: Vec<ElementTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CdgaBlock {
    pub basis: Vec<BasisEntry>,
    pub unit: String,
    #[serde(default)]
    pub products: Vec<ProductEntry>,
    #[serde(default)]
    pub differential: Vec<LinearEntry>,
    pub representatives: Vec<NamedCombination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contraction: Option<Vec<ContractionEntry>>,
    #[serde(default = "default_length")]
    pub max_length: usize,
}

fn default_length() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleBlock {
    pub group: Vec<BasisEntry>,
    /// One class per group generator, in the basis dual to the homology basis.
    pub classes: Vec<NamedCombination>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis: Vec<BasisEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coproducts: Vec<CoproductBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairing: Vec<PairingEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cdga: Option<CdgaBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleBlock>,
}

/// Validated objects from a model file.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub manifold: ManifoldModel,
    pub cdga: Option<(CdgaModel, usize)>,
    pub bundle: Option<BundleModel>,
}

fn coeff(s: &str, at: &str) -> Result<Q, ModelError> {
    parse_q(s).map_err(|_| ModelError::Syntax {
        path: at.to_string(),
        message: format!("`{s}` is not a rational p/q"),
    })
}

fn space(name: &str, basis: &[BasisEntry]) -> Result<GradedSpace, ModelError> {
    let entries = basis.iter().map(|b| (b.name.clone(), b.degree)).collect();
    Ok(GradedSpace::from_owned(name, entries)?)
}

fn index(space: &GradedSpace, name: &str, at: &str) -> Result<usize, ModelError> {
    space
        .index_of(name)
        .map_err(|_| ModelError::Invalid(format!("{at}: unknown element `{name}`")))
}

fn combination(
    space: &GradedSpace,
    terms: &[ElementTerm],
    at: &str,
) -> Result<Lin<usize>, ModelError> {
    let mut out = Lin::zero();
    for (k, t) in terms.iter().enumerate() {
        let at = format!("{at}.terms[{k}]");
        out.add_term(index(space, &t.element, &at)?, coeff(&t.coeff, &at)?);
    }
    Ok(out)
}

fn terms_of(space: &GradedSpace, v: &Lin<usize>) -> Vec<ElementTerm> {
    v.iter()
        .map(|(i, c)| ElementTerm {
            element: space.element_name(*i).to_string(),
            coeff: format_q(c),
        })
        .collect()
}

fn coalgebra(file: &ModelFile) -> Result<(GradedSpace, FiniteFamily, Pairing), ModelError> {
    let c = space("C", &file.basis)?;
    let top = file
        .coproducts
        .iter()
        .map(|b| b.arity)
        .max()
        .unwrap_or(2)
        .max(2);
    let mut maps: Vec<GradedMap> = (1..=top)
        .map(|n| GradedMap::zero(c.clone(), c.clone(), 1, n, n as i64 - 2))
        .collect();
    for (bi, block) in file.coproducts.iter().enumerate() {
        if block.arity == 0 {
            return Err(ModelError::Invalid(format!(
                "coproducts[{bi}]: arity must be positive"
            )));
        }
        for (ei, e) in block.entries.iter().enumerate() {
            let at = format!("coproducts[{bi}].entries[{ei}]");
            let x = index(&c, &e.input, &at)?;
            for (ti, t) in e.terms.iter().enumerate() {
                let at = format!("{at}.terms[{ti}]");
                if t.word.len() != block.arity {
                    return Err(ModelError::Invalid(format!(
                        "{at}: word length differs from arity"
                    )));
                }
                let w = t
                    .word
                    .iter()
                    .map(|n| index(&c, n, &at))
                    .collect::<Result<Vec<_>, _>>()?;
                maps[block.arity - 1]
                    .add_entry(vec![x], w, coeff(&t.coeff, &at)?)
                    .map_err(|err| ModelError::Invalid(format!("{at}: {err}")))?;
            }
        }
    }
    let family = FiniteFamily::coalgebra_from_unshifted(StructureKind::CinfCoalgebra, &c, &maps)?;
    let mut entries = Vec::new();
    for (k, p) in file.pairing.iter().enumerate() {
        let at = format!("pairing[{k}]");
        entries.push((
            index(&c, &p.left, &at)?,
            index(&c, &p.right, &at)?,
            coeff(&p.value, &at)?,
        ));
    }
    let pairing = Pairing::new(c.clone(), &entries)?;
    Ok((c, family, pairing))
}

fn cdga(block: &CdgaBlock) -> Result<CdgaModel, ModelError> {
    let a = space("A", &block.basis)?;
    let unit = index(&a, &block.unit, "cdga.unit")?;
    let mut products = Vec::new();
    for (k, p) in block.products.iter().enumerate() {
        let at = format!("cdga.products[{k}]");
        let (i, j) = (index(&a, &p.left, &at)?, index(&a, &p.right, &at)?);
        products.push((i.min(j), i.max(j), combination(&a, &p.terms, &at)?));
    }
    let mut d = vec![Lin::zero(); a.dim()];
    for (k, e) in block.differential.iter().enumerate() {
        let at = format!("cdga.differential[{k}]");
        d[index(&a, &e.element, &at)?] = combination(&a, &e.terms, &at)?;
    }
    let mut reps = Vec::new();
    for (k, r) in block.representatives.iter().enumerate() {
        let at = format!("cdga.representatives[{k}]");
        reps.push((r.name.clone(), combination(&a, &r.terms, &at)?));
    }
    let mut model = CdgaModel::new(a.clone(), unit, &products, d, reps)?;
    if let Some(pairs) = &block.contraction {
        let mut out = Vec::new();
        for (k, p) in pairs.iter().enumerate() {
            let at = format!("cdga.contraction[{k}]");
            out.push((
                combination(&a, &p.exact, &format!("{at}.exact"))?,
                combination(&a, &p.primitive, &format!("{at}.primitive"))?,
            ));
        }
        model = model.with_contraction(out)?;
    }
    Ok(model)
}

fn bundle(base: &ManifoldModel, block: &BundleBlock) -> Result<BundleModel, ModelError> {
    let group = space("G", &block.group)?;
    let mut classes = vec![Lin::zero(); group.dim()];
    let mut seen = vec![false; group.dim()];
    for (k, c) in block.classes.iter().enumerate() {
        let at = format!("bundle.classes[{k}]");
        let g = index(&group, &c.name, &at)?;
        seen[g] = true;
        classes[g] = combination(&base.homology, &c.terms, &at)?;
    }
    if let Some(g) = seen.iter().position(|s| !s) {
        return Err(ModelError::Invalid(format!(
            "bundle: no class given for `{}`",
            group.element_name(g)
        )));
    }
    BundleModel::new(base.clone(), group, classes).map_err(|e| match e {
        AppError::EvenGenerator(_) | AppError::ClassDegree { .. } | AppError::ClassCount { .. } => {
            ModelError::Invalid(e.to_string())
        }
        other => ModelError::Verification(other),
    })
}

/// Parses JSON text into a [`ModelFile`], naming the path of any offending field.
pub fn parse_model_str(text: &str) -> Result<ModelFile, ModelError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| ModelError::Syntax {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Builds and verifies every object described by the file.
pub fn load_model(file: &ModelFile) -> Result<LoadedModel, ModelError> {
    let has_coalgebra = !file.basis.is_empty();
    let (manifold, cdga_model) = match (&file.cdga, has_coalgebra) {
        (Some(_), true) => {
            return Err(ModelError::Invalid(
                "give either a coalgebra (basis) or a cdga block, not both".into(),
            ))
        }
        (None, false) => return Err(ModelError::Invalid("no manifold data".into())),
        (None, true) => {
            let (c, f, p) = coalgebra(file)?;
            (ManifoldModel::from_coalgebra(&file.name, c, f, p)?, None)
        }
        (Some(block), false) => {
            let model = cdga(block)?;
            let m = ManifoldModel::from_cdga(&file.name, &model, block.max_length)?;
            (m, Some((model, block.max_length)))
        }
    };
    let bundle = match &file.bundle {
        Some(b) => Some(bundle(&manifold, b)?),
        None => None,
    };
    Ok(LoadedModel {
        manifold,
        cdga: cdga_model,
        bundle,
    })
}

pub fn parse_model_file(path: &Path) -> Result<LoadedModel, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_model(&parse_model_str(&text)?)
}

/// Writes a loaded model back out in coalgebra form (plus the CDGA and bundle blocks).
pub fn to_model_file(m: &LoadedModel) -> ModelFile {
    let man = &m.manifold;
    let c = &man.homology;
    let basis = (0..c.dim())
        .map(|i| BasisEntry {
            name: c.element_name(i).to_string(),
            degree: c.degree(i),
        })
        .collect();
    let mut coproducts = Vec::new();
    for (k, map) in man.coalgebra.unshifted_maps().iter().enumerate() {
        let entries: Vec<MapEntry> = map
            .entries()
            .filter(|(_, v)| !v.is_zero())
            .map(|(x, v)| MapEntry {
                input: c.element_name(x[0]).to_string(),
                terms: v
                    .iter()
                    .map(|(w, q)| WordTerm {
                        word: w.iter().map(|&y| c.element_name(y).to_string()).collect(),
                        coeff: format_q(q),
                    })
                    .collect(),
            })
            .collect();
        if !entries.is_empty() {
            coproducts.push(CoproductBlock {
                arity: k + 1,
                entries,
            });
        }
    }
    let mut pairing = Vec::new();
    for i in 0..c.dim() {
        for j in 0..c.dim() {
            let v = man.pairing.value(i, j);
            if v != Q::from_integer(0.into()) {
                pairing.push(PairingEntry {
                    left: c.element_name(i).to_string(),
                    right: c.element_name(j).to_string(),
                    value: format_q(&v),
                });
            }
        }
    }
    let bundle = m.bundle.as_ref().map(|b| BundleBlock {
        group: (0..b.group.dim())
            .map(|i| BasisEntry {
                name: b.group.element_name(i).to_string(),
                degree: b.group.degree(i),
            })
            .collect(),
        classes: b
            .classes
            .iter()
            .enumerate()
            .map(|(i, p)| NamedCombination {
                name: b.group.element_name(i).to_string(),
                terms: terms_of(c, p),
            })
            .collect(),
    });
    ModelFile {
        name: man.name.clone(),
        basis,
        coproducts,
        pairing,
        cdga: None,
        bundle,
    }
}

/// Writes a CDGA model as a file block.
pub fn cdga_block(model: &CdgaModel, max_length: usize) -> CdgaBlock {
    let a = &model.space;
    CdgaBlock {
        basis: (0..a.dim())
            .map(|i| BasisEntry {
                name: a.element_name(i).to_string(),
                degree: a.degree(i),
            })
            .collect(),
        unit: a.element_name(model.unit).to_string(),
        products: model
            .product_table()
            .iter()
            .map(|(i, j, v)| ProductEntry {
                left: a.element_name(*i).to_string(),
                right: a.element_name(*j).to_string(),
                terms: terms_of(a, v),
            })
            .collect(),
        differential: model
            .differential()
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| LinearEntry {
                element: a.element_name(i).to_string(),
                terms: terms_of(a, v),
            })
            .collect(),
        representatives: model
            .representatives
            .iter()
            .map(|(n, r)| NamedCombination {
                name: n.clone(),
                terms: terms_of(a, r),
            })
            .collect(),
        contraction: model.contraction().map(|pairs| {
            pairs
                .iter()
                .map(|(y, h)| ContractionEntry {
                    exact: terms_of(a, y),
                    primitive: terms_of(a, h),
                })
                .collect()
        }),
        max_length,
    }
}

pub fn to_json(file: &ModelFile) -> String {
    serde_json::to_string_pretty(file).expect("model files serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const S2: &str = include_str!("../../../fixtures/s2.json");
    const CP2_CDGA: &str = include_str!("../../../fixtures/cp2-cdga.json");
    const HOPF: &str = include_str!("../../../fixtures/hopf.json");

    fn load(text: &str) -> LoadedModel {
        load_model(&parse_model_str(text).unwrap()).unwrap()
    }

    #[test]
    fn s2_round_trips() {
        let first = load(S2);
        let file = to_model_file(&first);
        let again = load(&to_json(&file));
        assert_eq!(again.manifold, first.manifold);
        assert_eq!(parse_model_str(&to_json(&file)).unwrap(), file);
    }

    #[test]
    fn bundle_round_trips() {
        let first = load(HOPF);
        let again = load(&to_json(&to_model_file(&first)));
        assert_eq!(again.bundle, first.bundle);
        assert!(again.bundle.is_some());
    }

    #[test]
    fn fractional_degree_names_the_field() {
        let text = S2.replacen("\"degree\": 2", "\"degree\": 2.5", 1);
        match parse_model_str(&text) {
            Err(ModelError::Syntax { path, .. }) => assert_eq!(path, "basis[1].degree"),
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn numbers_are_not_accepted_as_coefficients() {
        let text = S2.replacen("\"value\": \"1\"", "\"value\": 1.0", 1);
        let err = parse_model_str(&text).unwrap_err();
        assert!(matches!(&err, ModelError::Syntax { path, .. } if path == "pairing[0].value"));
        assert!(err.is_input_error());
        let text = S2.replacen("\"value\": \"1\"", "\"value\": \"one\"", 1);
        let err = load_model(&parse_model_str(&text).unwrap()).unwrap_err();
        assert!(matches!(&err, ModelError::Syntax { path, .. } if path == "pairing[0]"));
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = S2.replacen(
            "\"name\": \"s2\"",
            "\"name\": \"s2\", \"colour\": \"red\"",
            1,
        );
        assert!(matches!(
            parse_model_str(&text),
            Err(ModelError::Syntax { .. })
        ));
    }

    #[test]
    fn cp2_cdga_block_parses_and_validates() {
        let m = load(CP2_CDGA);
        let (model, len) = m.cdga.clone().unwrap();
        assert_eq!(len, 4);
        for i in 0..model.space.dim() {
            assert!(model.d(&model.d(&Lin::basis(i))).is_zero());
        }
        let x = Lin::basis(1);
        assert_eq!(model.mul(&x, &x), Lin::basis(2));
        assert_eq!(m.manifold.homology.dim(), 3);
        let block = cdga_block(&model, len);
        let back = cdga(&block).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn failing_structures_are_verification_errors() {
        let text = S2.replacen(
            "\"word\": [\n                \"e0\",\n                \"e2\"\n              ],\n              \"coeff\": \"1\"",
            "\"word\": [\n                \"e0\",\n                \"e2\"\n              ],\n              \"coeff\": \"2\"",
            1,
        );
        assert_ne!(text, S2);
        let err = load_model(&parse_model_str(&text).unwrap()).unwrap_err();
        assert!(!err.is_input_error(), "{err}");
        let text = S2.replacen("\"input\": \"e2\"", "\"input\": \"e7\"", 1);
        let err = load_model(&parse_model_str(&text).unwrap()).unwrap_err();
        assert!(err.is_input_error());
        assert!(err.to_string().contains("e7"));
    }
}
