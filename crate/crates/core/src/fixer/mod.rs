//! Fixer predicates and verification engines.
//!
//! The engines certify, element by element, that members of the normalizer
//! N(E₀) = (Q:H(q₀)):⟨φ⟩ are conjugate to elements with every coordinate in
//! the q₀-subfield (hence into the subfield-stabilizer), sweep whole
//! subgroups at desk scale, run the order-inequality suites behind the
//! exclusion arguments, and emit machine-readable reports.

mod certify;
mod orders;
mod q27;
mod sweep;

pub use certify::{certify_subfield_conjugacy, report_key, Certificate, NotConjugable};
pub use orders::{exclusion_inequalities, OrderTable};
pub use q27::q27_certificate;
pub use sweep::{
    verify_not_fixer_r3, verify_r3_witness, verify_theorem_case_i, SweepMode, SweepOutcome,
};

use crate::borel::{Borel, GroupElt, Unipotent};
use crate::gf3m::{is_prime, FieldCtx, FieldError, Fq, Subfield};
use crate::lattice;
use serde::Serialize;
use std::collections::BTreeSet;

/// Verification verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "PARTIAL")]
    Partial,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub elt: String,
    pub reason: String,
}

/// Machine-readable sweep outcome. Field order is part of the JSON contract.
#[derive(Clone, Debug, Serialize)]
pub struct FixerReport {
    pub case: String,
    pub q: u64,
    pub q0: u64,
    pub with_phi: bool,
    pub status: Status,
    pub counts: std::collections::BTreeMap<String, u64>,
    pub counterexamples: Vec<Counterexample>,
    pub elapsed_ms: u64,
}

/// One evaluated check line of a lemma-style report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub relation: String,
    pub holds: bool,
}

/// Report for the non-sweep verifications (inequalities, certificates,
/// lattice identities).
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub case: String,
    pub q: u64,
    pub status: Status,
    pub lines: Vec<CheckLine>,
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
}

impl LemmaReport {
    pub fn new(case: &str, q: u64) -> Self {
        LemmaReport {
            case: case.to_string(),
            q,
            status: Status::Pass,
            lines: Vec::new(),
            notes: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn push(&mut self, name: &str, lhs: impl ToString, rhs: impl ToString, relation: &str, holds: bool) {
        if !holds {
            self.status = Status::Fail;
        }
        self.lines.push(CheckLine {
            name: name.to_string(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            relation: relation.to_string(),
            holds,
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl FixerReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

// ---------------------------------------------------------------------------
// subgroup specifications
// ---------------------------------------------------------------------------

/// A sweepable subgroup of B:⟨φ⟩.
#[derive(Clone, Debug)]
pub enum SubgroupSpec {
    /// N(E₀) = Q:H(q₀) extended by ⟨φ⟩ when `with_phi`; E₀ is the part of the
    /// center Z(Q) with coordinates in the q₀-subfield.
    NGE0 { q0: Subfield, with_phi: bool },
    /// Q:H(q₀) (the `with_phi = false` shape, kept as its own name).
    QHq0 { q0: Subfield },
    Explicit(Vec<GroupElt>),
}

impl SubgroupSpec {
    pub fn order(&self, f: &FieldCtx) -> u128 {
        let q = f.q() as u128;
        match self {
            SubgroupSpec::NGE0 { q0, with_phi } => {
                q * q * q * (q0.size() as u128 - 1) * if *with_phi { f.m() as u128 } else { 1 }
            }
            SubgroupSpec::QHq0 { q0 } => q * q * q * (q0.size() as u128 - 1),
            SubgroupSpec::Explicit(els) => els.len() as u128,
        }
    }

    /// Elements in deterministic order (t outermost for the structured kinds).
    pub fn elements<'b, 'f>(&'b self, b: &'b Borel<'f>) -> Box<dyn Iterator<Item = GroupElt> + 'b> {
        match self {
            SubgroupSpec::Explicit(els) => Box::new(els.iter().copied()),
            SubgroupSpec::QHq0 { q0 } => Box::new(nge0_iter(b, *q0, false)),
            SubgroupSpec::NGE0 { q0, with_phi } => Box::new(nge0_iter(b, *q0, *with_phi)),
        }
    }
}

fn nge0_iter<'b, 'f>(
    b: &'b Borel<'f>,
    q0: Subfield,
    with_phi: bool,
) -> impl Iterator<Item = GroupElt> + 'b {
    let f = b.f;
    let units = subfield_units(f, q0);
    let js: Vec<usize> = if with_phi { (0..f.m()).collect() } else { vec![0] };
    b.unipotent_elements().flat_map(move |x| {
        let units = units.clone();
        let js = js.clone();
        units.into_iter().flat_map(move |s| {
            let js = js.clone();
            js.into_iter().map(move |j| GroupElt { x, s, j })
        })
    })
}

/// Nonzero q₀-subfield elements in enumeration order.
pub fn subfield_units(f: &FieldCtx, q0: Subfield) -> Vec<Fq> {
    f.subfield_elements(q0)
        .into_iter()
        .filter(|&s| !f.is_zero(s))
        .collect()
}

/// The subgroup N(E₀) for a proper subfield; rejects q₀ = q.
pub fn build_nge0(f: &FieldCtx, q0: Subfield, with_phi: bool) -> Result<SubgroupSpec, FieldError> {
    if q0.d() == f.m() {
        return Err(FieldError::Domain(
            "the normalized subgroup needs a proper subfield".into(),
        ));
    }
    Ok(SubgroupSpec::NGE0 { q0, with_phi })
}

/// Checks that q = q₀^r with r an odd prime other than 3.
pub fn check_tower(f: &FieldCtx, q0: Subfield) -> Result<usize, FieldError> {
    let r = f.m() / q0.d();
    if r == 3 {
        return Err(FieldError::Domain(
            "tower degree r = 3 is outside the hypothesis (r must be an odd prime ≠ 3)".into(),
        ));
    }
    if r < 3 || !is_prime(r as u64) {
        return Err(FieldError::Domain(format!(
            "tower degree r = {r} must be an odd prime other than 3"
        )));
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

/// The set of element orders of an enumerable subgroup.
pub fn spectrum_of(b: &Borel, spec: &SubgroupSpec, cap: u128) -> Result<BTreeSet<u64>, FieldError> {
    if spec.order(b.f) > cap {
        return Err(FieldError::Domain(format!(
            "subgroup of order {} exceeds the spectrum cap {}",
            spec.order(b.f),
            cap
        )));
    }
    Ok(spec.elements(b).map(|e| b.order(e)).collect())
}

pub fn spec_subset_check(spectrum: &BTreeSet<u64>, allowed: &BTreeSet<u64>) -> bool {
    spectrum.is_subset(allowed)
}

// ---------------------------------------------------------------------------
// the unipotent-order bound via the translate lattice
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct DimBoundReport {
    /// Every order-9 member satisfies u ∈ t^{3θ+1}A.
    pub precondition_ok: bool,
    pub offender: Option<Unipotent>,
    /// dim of the t-coordinate image K∩Q/(K∩Q').
    pub dim_t: usize,
    /// dim of the u-coordinate image K∩Q'/(K∩Z(Q)).
    pub dim_u: usize,
    pub dims_sum_le_m: bool,
    /// the u-image sits inside ⋂ t^{3θ+1}A over the nonzero t-image.
    pub u_image_contained: bool,
    pub size: usize,
    pub size_le_q2: bool,
}

impl DimBoundReport {
    pub fn holds(&self) -> bool {
        self.precondition_ok && self.dims_sum_le_m && self.u_image_contained && self.size_le_q2
    }
}

/// Evaluates the order bound |K∩Q| ≤ q² for a subgroup K ≤ Q all of whose
/// order-9 elements are conjugate to their inverses (u ∈ t^{3θ+1}A). The two
/// coordinate images are computed as 𝔽₃-subspaces and the translate-lattice
/// dimension identity caps their dimension sum by m.
pub fn dim_bound_check(b: &Borel, k_elements: &[Unipotent]) -> DimBoundReport {
    let f = b.f;
    let mut precondition_ok = true;
    let mut offender = None;
    for &e in k_elements {
        if !f.is_zero(e.t) {
            let t31 = f.pow_3t_plus_1(e.t);
            let ratio = f.mul(e.u, f.inv(t31).expect("t is nonzero"));
            if f.trace_to_prime(ratio) != 0 {
                precondition_ok = false;
                offender = Some(e);
                break;
            }
        }
    }

    let t_image: Vec<Fq> = k_elements.iter().map(|e| e.t).collect();
    let u_image: Vec<Fq> = k_elements
        .iter()
        .filter(|e| f.is_zero(e.t))
        .map(|e| e.u)
        .collect();
    let t_space = lattice::Subspace::from_vectors(f, &t_image);
    let u_space = lattice::Subspace::from_vectors(f, &u_image);

    let translates: Vec<Fq> = t_space
        .elements(f)
        .into_iter()
        .filter(|&t| !f.is_zero(t))
        .map(|t| f.pow_3t_plus_1(t))
        .collect();
    let u_image_contained = if translates.is_empty() {
        true
    } else {
        let inter = lattice::intersect_translates(f, &translates).expect("nonzero translates");
        u_space.basis().iter().all(|&u| inter.contains(f, u))
    };

    let q2 = (f.q() * f.q()) as usize;
    DimBoundReport {
        precondition_ok,
        offender,
        dim_t: t_space.dim(),
        dim_u: u_space.dim(),
        dims_sum_le_m: t_space.dim() + u_space.dim() <= f.m(),
        u_image_contained,
        size: k_elements.len(),
        size_le_q2: k_elements.len() <= q2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::Borel;
    use crate::gf3m::FieldCtx;

    fn gf27() -> FieldCtx {
        FieldCtx::with_modulus(&[2, 2, 0, 1]).unwrap()
    }

    #[test]
    fn nge0_orders() {
        let f243 = FieldCtx::new(5).unwrap();
        let p = f243.subfield(1).unwrap();
        let spec = build_nge0(&f243, p, true).unwrap();
        assert_eq!(spec.order(&f243), 143_489_070);
        let spec0 = build_nge0(&f243, p, false).unwrap();
        assert_eq!(spec0.order(&f243), 28_697_814);

        let f27 = gf27();
        let p27 = f27.subfield(1).unwrap();
        let s = build_nge0(&f27, p27, false).unwrap();
        assert_eq!(s.order(&f27), 39_366);
        let whole = f27.subfield(3).unwrap();
        assert!(build_nge0(&f27, whole, false).is_err());
    }

    #[test]
    fn nge0_iteration_matches_order() {
        let f = gf27();
        let b = Borel::new(&f);
        let p = f.subfield(1).unwrap();
        let spec = build_nge0(&f, p, true).unwrap();
        assert_eq!(spec.elements(&b).count() as u128, spec.order(&f));
        for e in spec.elements(&b).take(100) {
            assert!(f.in_subfield(e.s, p));
        }
    }

    #[test]
    fn tower_check() {
        let f243 = FieldCtx::new(5).unwrap();
        let p = f243.subfield(1).unwrap();
        assert_eq!(check_tower(&f243, p).unwrap(), 5);
        let f27 = gf27();
        assert!(check_tower(&f27, f27.subfield(1).unwrap()).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let f3 = FieldCtx::new(1).unwrap();
        let b3 = Borel::new(&f3);
        let q_spec = SubgroupSpec::Explicit(b3.unipotent_elements().map(|x| b3.from_uni(x)).collect());
        let spec_q = spectrum_of(&b3, &q_spec, 1 << 20).unwrap();
        assert_eq!(spec_q, [1, 3, 9].into_iter().collect());

        let f27 = gf27();
        let b27 = Borel::new(&f27);
        let p = f27.subfield(1).unwrap();
        let qh = SubgroupSpec::QHq0 { q0: p };
        let spec_qh = spectrum_of(&b27, &qh, 1 << 20).unwrap();
        assert_eq!(spec_qh, [1, 2, 3, 6, 9].into_iter().collect());

        let allowed: BTreeSet<u64> = [1, 3, 9].into_iter().collect();
        assert!(spec_subset_check(&[1, 3].into_iter().collect(), &allowed));
        assert!(!spec_subset_check(&[1, 2].into_iter().collect(), &allowed));
    }

    #[test]
    fn spectrum_cap_guard() {
        let f = gf27();
        let b = Borel::new(&f);
        let p = f.subfield(1).unwrap();
        let qh = SubgroupSpec::QHq0 { q0: p };
        assert!(spectrum_of(&b, &qh, 100).is_err());
    }

    #[test]
    fn dim_bound_on_cyclic_closure() {
        // closure of X(1,1,0) at q=27: all order-9 members are self-paired,
        // dims sum ≤ 3, size ≤ 729
        let f = gf27();
        let b = Borel::new(&f);
        let gen = b.from_uni(b.uni(f.one(), f.one(), f.zero()));
        let cl = b.closure(&[gen], 1000).unwrap();
        let elems: Vec<_> = cl.iter().map(|e| e.x).collect();
        let rep = dim_bound_check(&b, &elems);
        assert!(rep.holds(), "{rep:?}");
        assert!(rep.dim_t + rep.dim_u <= 3);
        assert!(rep.size <= 729);
    }

    #[test]
    fn dim_bound_rejects_all_of_q() {
        // Q itself contains non-self-paired order-9 elements
        let f = gf27();
        let b = Borel::new(&f);
        let all: Vec<_> = b.unipotent_elements().collect();
        let rep = dim_bound_check(&b, &all);
        assert!(!rep.precondition_ok);
        assert!(rep.offender.is_some());
    }

    #[test]
    fn dim_bound_derived_subgroup_trivial() {
        // Q' has no order-9 elements; bound holds trivially
        let f = gf27();
        let b = Borel::new(&f);
        let qprime: Vec<_> = b
            .unipotent_elements()
            .filter(|e| f.is_zero(e.t))
            .collect();
        let rep = dim_bound_check(&b, &qprime);
        assert!(rep.precondition_ok);
        assert_eq!(rep.dim_t, 0);
        assert!(rep.holds());
    }
}
