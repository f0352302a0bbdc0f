//! Drivers for based path spaces, free loop spaces, the loop product, and principal
//! bundles.

use crate::connection_builder::{
    build_power_series_connection, extract_structures, CdgaModel, ConnectionError,
};
use crate::free_objects::{TruncationPolicy, Word};
use crate::graded_core::{GradedMap, GradedSpace, Lin, Q};
use crate::homology_engine::{
    assemble_complex, homology, induced_product, ChainComplex, HomologyError, HomologyResult,
    ProductTable,
};
use crate::homotopy_structures::{
    check_ainf, check_cinfty, check_cyclic, dual_algebra, DefectReport, FiniteFamily, Pairing,
    StructureError, StructureFamily, StructureKind,
};
use crate::hopf::{HopfAlgebra, HopfError};
use crate::linalg;
use crate::twisted_builders::{
    build_twisted_algebra, build_twisted_coalgebra, untwisted_tensor_coalgebra, ActionKind,
    BuildError, TensorKey, TwistedCoalgebra,
};
use crate::twisting::{TargetKind, TwistingCochain, TwistingError};
use num_traits::Zero;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AppError {
    #[error("`{0}` has degree 1; the manifold must be simply connected")]
    NotSimplyConnected(String),
    #[error("pairing is not a Poincare pairing: {0}")]
    NotPoincare(String),
    #[error("coalgebra fails the {relation} relation at arity {arity}")]
    Coalgebra {
        relation: &'static str,
        arity: usize,
    },
    #[error("group generator `{0}` must have odd degree")]
    EvenGenerator(String),
    #[error("class for `{name}` must have degree {expected}")]
    ClassDegree { name: String, expected: i64 },
    #[error("group generator `{0}` is not primitive")]
    NotPrimitive(String),
    #[error("expected {expected} characteristic classes, got {found}")]
    ClassCount { expected: usize, found: usize },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Twisting(#[from] TwistingError),
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Graded(#[from] crate::graded_core::GradedError),
}

/// A simply connected closed manifold through its homology coalgebra, pairing, Lie model
/// and inclusion twisting cochain.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldModel {
    pub name: String,
    pub homology: GradedSpace,
    pub coalgebra: FiniteFamily,
    pub pairing: Pairing,
    pub lie: HopfAlgebra,
    pub tau: TwistingCochain,
}

fn generator_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{i}")
    }
}

/// `T(H̄[-1])` with the differential dual to the reduced coalgebra maps, and the inclusion
/// `H → T(H̄[-1])`. The point class is the unique degree-0 basis element.
pub fn cobar_lie_model(
    homology: &GradedSpace,
    coalgebra: &FiniteFamily,
) -> Result<(HopfAlgebra, TwistingCochain), AppError> {
    let point = point_class(homology)?;
    let positive: Vec<usize> = (0..homology.dim()).filter(|&x| x != point).collect();
    let gen_of = |x: usize| positive.iter().position(|&y| y == x);
    let gens: Vec<(String, i64)> = positive
        .iter()
        .enumerate()
        .map(|(i, &x)| (generator_name(i), homology.degree(x) - 1))
        .collect();
    let mut diffs = Vec::new();
    for &x in &positive {
        let mut v: Lin<Word> = Lin::zero();
        for n in 1..=coalgebra.max_arity() {
            for (ys, c) in coalgebra.op(n, &[x]).iter() {
                if let Some(w) = ys.iter().map(|&y| gen_of(y)).collect::<Option<Word>>() {
                    v.add_term(w, c.clone());
                }
            }
        }
        diffs.push(v);
    }
    let lie = HopfAlgebra::tensor(GradedSpace::from_owned("L", gens)?).with_differential(diffs)?;
    let values = (0..homology.dim())
        .map(|x| gen_of(x).map_or_else(Lin::zero, |i| Lin::basis(vec![i])))
        .collect();
    let tau = TwistingCochain::new(homology, &lie, values, TargetKind::Lie)?;
    Ok((lie, tau))
}

fn point_class(homology: &GradedSpace) -> Result<usize, AppError> {
    let zeros: Vec<usize> = (0..homology.dim())
        .filter(|&i| homology.degree(i) == 0)
        .collect();
    match zeros.as_slice() {
        [p] => Ok(*p),
        _ => Err(AppError::NotPoincare(format!(
            "expected one degree 0 class, found {}",
            zeros.len()
        ))),
    }
}

impl ManifoldModel {
    /// Validates simple connectivity, the Poincaré pairing, the C∞ and cyclic relations,
    /// and the Maurer–Cartan equation for `τ`.
    pub fn new(
        name: &str,
        homology: GradedSpace,
        coalgebra: FiniteFamily,
        pairing: Pairing,
        lie: HopfAlgebra,
        tau: TwistingCochain,
    ) -> Result<Self, AppError> {
        if let Some(i) = (0..homology.dim()).find(|&i| homology.degree(i) == 1) {
            return Err(AppError::NotSimplyConnected(
                homology.element_name(i).to_string(),
            ));
        }
        let point = point_class(&homology)?;
        let dim = pairing.dimension();
        let tops: Vec<usize> = (0..homology.dim())
            .filter(|&i| homology.degree(i) == dim)
            .collect();
        if tops.len() != 1 || pairing.value(point, tops[0]).is_zero() {
            return Err(AppError::NotPoincare(
                "the top class must pair with the point class".into(),
            ));
        }
        let policy =
            TruncationPolicy::new(dim + 1, coalgebra.max_arity().max(2) + 1).expect("valid policy");
        if let Some(d) = check_ainf(&coalgebra, &policy)?.defects.first() {
            return Err(AppError::Coalgebra {
                relation: "A-infinity",
                arity: d.arity,
            });
        }
        if let Some(d) = check_cinfty(&coalgebra, &policy).defects.first() {
            return Err(AppError::Coalgebra {
                relation: "C-infinity",
                arity: d.arity,
            });
        }
        if let Some(d) = check_cyclic(&coalgebra, &pairing)?.defects.first() {
            return Err(AppError::Coalgebra {
                relation: "cyclic",
                arity: d.arity,
            });
        }
        let report = crate::twisting::check_maurer_cartan(&tau, &coalgebra, &lie, &policy)?;
        if let Some(e) = report.entries.iter().find(|e| !e.total.is_zero()) {
            return Err(
                BuildError::MaurerCartan(homology.element_name(e.element).to_string()).into(),
            );
        }
        Ok(ManifoldModel {
            name: name.to_string(),
            homology,
            coalgebra,
            pairing,
            lie,
            tau,
        })
    }

    /// Uses the cobar Lie model of the coalgebra.
    pub fn from_coalgebra(
        name: &str,
        homology: GradedSpace,
        coalgebra: FiniteFamily,
        pairing: Pairing,
    ) -> Result<Self, AppError> {
        let (lie, tau) = cobar_lie_model(&homology, &coalgebra)?;
        Self::new(name, homology, coalgebra, pairing, lie, tau)
    }

    /// Runs the power series connection on a CDGA model. The homology pairing is the
    /// inverse transpose of the cup pairing into the top class.
    pub fn from_cdga(name: &str, model: &CdgaModel, max_length: usize) -> Result<Self, AppError> {
        let psc = build_power_series_connection(model, max_length)?;
        let ex = extract_structures(&psc, model)?;
        let mut reps: Vec<Lin<usize>> = vec![Lin::basis(model.unit)];
        reps.extend(model.representatives.iter().map(|(_, r)| r.clone()));
        let n = reps.len();
        let degree = |r: &Lin<usize>| r.keys().next().map_or(0, |&k| model.space.degree(k));
        let top_deg = reps.iter().map(degree).max().unwrap_or(0);
        let top: Vec<usize> = (1..n).filter(|&i| degree(&reps[i]) == top_deg).collect();
        if top.len() != 1 {
            return Err(AppError::NotPoincare(
                "the model needs a unique top class".into(),
            ));
        }
        let mut cup = linalg::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if degree(&reps[i]) + degree(&reps[j]) != top_deg {
                    continue;
                }
                let prod = model.mul(&reps[i], &reps[j]);
                cup[i][j] = if i == 0 || j == 0 {
                    if i + j == top[0] {
                        Q::from_integer(1.into())
                    } else {
                        Q::zero()
                    }
                } else {
                    model.cohomology_coordinates(&prod)?[top[0] - 1].clone()
                };
            }
        }
        let inv = linalg::inverse(&cup)
            .ok_or_else(|| AppError::NotPoincare("cup pairing is degenerate".into()))?;
        let entries: Vec<(usize, usize, Q)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !inv[j][i].is_zero())
            .map(|(i, j)| (i, j, inv[j][i].clone()))
            .collect();
        let pairing = Pairing::new(ex.homology.clone(), &entries)?;
        Self::new(
            name,
            ex.homology,
            ex.coalgebra,
            pairing,
            ex.lie_model,
            ex.tau,
        )
    }

    pub fn dimension(&self) -> i64 {
        self.pairing.dimension()
    }

    fn policy(&self, max_degree: usize) -> TruncationPolicy {
        let d = max_degree as i64 + 1;
        TruncationPolicy::new(d, (d as usize).max(2)).expect("valid policy")
    }

    pub fn twisted_family(
        &self,
        action: ActionKind,
        max_degree: usize,
    ) -> Result<TwistedCoalgebra, AppError> {
        Ok(build_twisted_coalgebra(
            &self.coalgebra,
            &self.lie,
            &self.tau,
            action,
            &self.policy(max_degree),
        )?)
    }

    pub fn untwisted_family(&self, max_degree: usize) -> TwistedCoalgebra {
        untwisted_tensor_coalgebra(&self.coalgebra, &self.lie, &self.policy(max_degree))
    }
}

/// A complex together with its homology.
#[derive(Clone, Debug)]
pub struct ModelHomology {
    pub complex: ChainComplex<TensorKey>,
    pub result: HomologyResult<TensorKey>,
}

impl ModelHomology {
    pub fn betti(&self) -> &[usize] {
        &self.result.betti
    }

    fn of(tc: &TwistedCoalgebra, max_degree: usize) -> Result<Self, AppError> {
        let complex = assemble_complex(tc, max_degree)?;
        let result = homology(&complex);
        Ok(ModelHomology { complex, result })
    }
}

/// `H_*(M) ⊗ T(H_*(M)[-1])` with the left multiplication action.
pub fn path_space_model(m: &ManifoldModel, max_degree: usize) -> Result<ModelHomology, AppError> {
    ModelHomology::of(
        &m.twisted_family(ActionKind::LeftMult, max_degree)?,
        max_degree,
    )
}

/// `H_*(M) ⊗ T(H_*(M)[-1])` with the conjugation action.
pub fn free_loop_model(m: &ManifoldModel, max_degree: usize) -> Result<ModelHomology, AppError> {
    ModelHomology::of(
        &m.twisted_family(ActionKind::Conjugation, max_degree)?,
        max_degree,
    )
}

/// The tensor product with `τ` forced to zero.
pub fn untwisted_loop_model(
    m: &ManifoldModel,
    max_degree: usize,
) -> Result<ModelHomology, AppError> {
    ModelHomology::of(&m.untwisted_family(max_degree), max_degree)
}

/// Homology of the free loop model together with the transported loop product.
pub fn loop_product_table(
    m: &ManifoldModel,
    max_degree: usize,
) -> Result<(ModelHomology, ProductTable), AppError> {
    let alg = build_twisted_algebra(
        &m.coalgebra,
        &m.pairing,
        &m.lie,
        &m.tau,
        ActionKind::Conjugation,
        &m.policy(max_degree),
    )?;
    let mh = ModelHomology::of(&alg.coalgebra, max_degree)?;
    let table = induced_product(&mh.complex, &mh.result, &alg)?;
    Ok((mh, table))
}

/// True iff both families have the same basis and the same operations of every arity.
pub fn same_coalgebra_maps(
    a: &TwistedCoalgebra,
    b: &TwistedCoalgebra,
    policy: &TruncationPolicy,
) -> bool {
    let keys = a.basis(policy);
    if keys != b.basis(policy) || a.max_arity() != b.max_arity() {
        return false;
    }
    keys.iter().all(|k| {
        (1..=a.max_arity())
            .all(|n| a.op(n, std::slice::from_ref(k)) == b.op(n, std::slice::from_ref(k)))
    })
}

/// Principal bundle data: odd generators `U_i` of `H^*(G)` and classes `p_i ∈ H^*(M)` with
/// `|p_i| = |U_i| + 1`, written in the basis dual to the homology basis of the base.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleModel {
    pub base: ManifoldModel,
    pub group: GradedSpace,
    pub classes: Vec<Lin<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BundleVariant {
    Homology,
    Cohomology,
}

/// Output of [`bundle_model`]. The cohomology variant also carries the dual A∞ algebra on
/// the cochains and its relation check.
#[derive(Clone, Debug)]
pub struct BundleReport {
    pub betti: Vec<usize>,
    pub family: TwistedCoalgebra,
    pub dual: Option<(FiniteFamily, DefectReport<usize>)>,
}

impl BundleModel {
    pub fn new(
        base: ManifoldModel,
        group: GradedSpace,
        classes: Vec<Lin<usize>>,
    ) -> Result<Self, AppError> {
        if classes.len() != group.dim() {
            return Err(AppError::ClassCount {
                expected: group.dim(),
                found: classes.len(),
            });
        }
        for i in 0..group.dim() {
            let name = group.element_name(i).to_string();
            if group.degree(i).rem_euclid(2) != 1 {
                return Err(AppError::EvenGenerator(name));
            }
            let expected = group.degree(i) + 1;
            if classes[i]
                .keys()
                .any(|&x| base.homology.degree(x) != expected)
            {
                return Err(AppError::ClassDegree { name, expected });
            }
        }
        Ok(BundleModel {
            base,
            group,
            classes,
        })
    }

    /// `Λ(u_i)`, the homology of the group.
    pub fn group_homology(&self) -> Result<HopfAlgebra, AppError> {
        Ok(HopfAlgebra::exterior(self.group.clone())?)
    }

    /// `τ(x) = Σ_i ⟨p_i, x⟩ u_i`.
    pub fn twisting_cochain(&self) -> Result<TwistingCochain, AppError> {
        let h = self.group_homology()?;
        for i in 0..self.group.dim() {
            if !h.is_primitive(&Lin::basis(vec![i])) {
                return Err(AppError::NotPrimitive(
                    self.group.element_name(i).to_string(),
                ));
            }
        }
        let values = (0..self.base.homology.dim())
            .map(|x| {
                self.classes
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.coeff(&x).is_zero())
                    .map(|(i, p)| (vec![i], p.coeff(&x)))
                    .collect()
            })
            .collect();
        Ok(TwistingCochain::new(
            &self.base.homology,
            &h,
            values,
            TargetKind::Hopf,
        )?)
    }

    pub fn family(
        &self,
        action: ActionKind,
        max_degree: usize,
    ) -> Result<TwistedCoalgebra, AppError> {
        let h = self.group_homology()?;
        let tau = self.twisting_cochain()?;
        let d = (max_degree as i64 + 1).max(self.total_dimension());
        let policy = TruncationPolicy::new(d, (d as usize).max(2)).expect("valid policy");
        Ok(build_twisted_coalgebra(
            &self.base.coalgebra,
            &h,
            &tau,
            action,
            &policy,
        )?)
    }

    pub fn untwisted_family(&self, max_degree: usize) -> Result<TwistedCoalgebra, AppError> {
        let h = self.group_homology()?;
        let d = (max_degree as i64 + 1).max(self.total_dimension());
        let policy = TruncationPolicy::new(d, (d as usize).max(2)).expect("valid policy");
        Ok(untwisted_tensor_coalgebra(
            &self.base.coalgebra,
            &h,
            &policy,
        ))
    }

    fn total_dimension(&self) -> i64 {
        self.base.dimension() + self.group.degrees().iter().sum::<i64>()
    }
}

/// Writes out a twisted coalgebra on all keys of weight at most the policy degree as a
/// finite family.
pub fn materialize(
    tc: &TwistedCoalgebra,
    policy: &TruncationPolicy,
) -> Result<FiniteFamily, AppError> {
    let keys = tc.basis(policy);
    let names: Vec<(String, i64)> = keys
        .iter()
        .map(|k| (tc.key_name(k), tc.degree(k)))
        .collect();
    let space = GradedSpace::from_owned("CH", names)?;
    let index = |k: &TensorKey| keys.iter().position(|j| j == k);
    let mut maps = Vec::new();
    for n in 1..=tc.max_arity() {
        let mut m = GradedMap::zero(space.clone(), space.clone(), 1, n, -1);
        for (i, k) in keys.iter().enumerate() {
            for (w, c) in tc.op(n, std::slice::from_ref(k)).iter() {
                if let Some(out) = w.iter().map(index).collect::<Option<Vec<usize>>>() {
                    m.add_entry(vec![i], out, c.clone())?;
                }
            }
        }
        maps.push(m);
    }
    let weights = keys.iter().map(|k| tc.weight(k)).collect();
    Ok(FiniteFamily::new(
        StructureKind::AinfCoalgebra,
        space,
        maps,
        weights,
    )?)
}

/// Cohomology Betti numbers of the dual of a finite coalgebra: degree `k` holds the
/// functionals on weight-`k` keys and the differential raises weight by one.
fn cochain_betti(dual: &FiniteFamily, max_degree: usize) -> Result<Vec<usize>, AppError> {
    let top = dual
        .weights()
        .iter()
        .copied()
        .max()
        .unwrap_or(0)
        .max(max_degree as i64 + 1) as usize;
    let mut basis = vec![Vec::new(); top + 2];
    let mut names = vec![Vec::new(); top + 2];
    for i in 0..dual.space.dim() {
        let r = top - dual.weights()[i] as usize;
        basis[r].push(i);
        names[r].push(dual.space.element_name(i).to_string());
    }
    let cx = ChainComplex::from_differential(top, basis, names, |&i| {
        dual.op(1, &[i]).map_keys(|v| v[0])
    })?;
    let reversed = homology(&cx).betti;
    Ok((0..=max_degree).map(|k| reversed[top - k]).collect())
}

/// Homology of `H_*(M) ⊗_τ H_*(G)` with the left multiplication action, or, for the
/// cohomology variant, the cohomology of the dual algebra on the cochains.
pub fn bundle_model(
    b: &BundleModel,
    max_degree: usize,
    variant: BundleVariant,
) -> Result<BundleReport, AppError> {
    let family = b.family(ActionKind::LeftMult, max_degree)?;
    match variant {
        BundleVariant::Homology => {
            let betti = ModelHomology::of(&family, max_degree)?.result.betti;
            Ok(BundleReport {
                betti,
                family,
                dual: None,
            })
        }
        BundleVariant::Cohomology => {
            let finite = materialize(&family, &family.policy)?;
            let dual = dual_algebra(&finite)?;
            let d = b.total_dimension() + 1;
            let policy = TruncationPolicy::new(d, 4).expect("valid policy");
            let report = check_ainf(&dual, &policy)?;
            let betti = cochain_betti(&dual, max_degree)?;
            Ok(BundleReport {
                betti,
                family,
                dual: Some((dual, report)),
            })
        }
    }
}
