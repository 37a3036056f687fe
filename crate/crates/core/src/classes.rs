//! Conjugacy-class invariants and canonical forms for Borel elements.
//!
//! The nonidentity unipotent classes of ²G₂(q) are separated by cheap
//! invariants: central elements ("Z"), the two square-class orbits in
//! Q'∖Z(Q) ("Y±", split by the quadratic character since the torus scales the
//! u-coordinate through s^{1−3θ}, whose image is exactly the squares), and
//! the three order-9 families ("X9:ι") separated by the 𝔽₃-valued invariant
//!
//!   ι(X(t,u,v)) = Tr_{q/3}(u·t^{−(3θ+1)} − 1),   t ≠ 0,
//!
//! which is constant on B-classes, negates under inversion, and vanishes
//! exactly on the elements conjugate to their own inverse. A brute-force
//! census over B backs all of this up at q ∈ {3, 27}.

use crate::borel::{Borel, GroupElt, Unipotent};
use crate::gf3m::{FieldError, Fq, Subfield};
use crate::lattice;
use std::collections::HashMap;

/// Conjugacy fingerprint of a Borel element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    Identity,
    /// Nonidentity central unipotent X(0,0,v).
    Z,
    /// X(0,u,0) with u a nonzero square.
    YPlus,
    /// X(0,u,0) with u a non-square.
    YMinus,
    /// Order-9 unipotent with the given ι ∈ {0,1,2}.
    X9(u8),
    /// Semisimple h(s); stores min(s, s⁻¹) in enumeration order.
    Torus(Fq),
    /// X(0,u,0)·h(−1); +1/−1 is the quadratic character of u, 0 means u = 0
    /// (the bare involution).
    Mixed(i8),
}

impl ClassLabel {
    /// Short stable tag ("Z", "Y+", "X9:1", "T:<s>", "M:+", ...).
    pub fn tag(&self, b: &Borel) -> String {
        match self {
            ClassLabel::Identity => "id".to_string(),
            ClassLabel::Z => "Z".to_string(),
            ClassLabel::YPlus => "Y+".to_string(),
            ClassLabel::YMinus => "Y-".to_string(),
            ClassLabel::X9(i) => format!("X9:{i}"),
            ClassLabel::Torus(s) => format!("T:{}", b.f.format_element(*s)),
            ClassLabel::Mixed(1) => "M:+".to_string(),
            ClassLabel::Mixed(-1) => "M:-".to_string(),
            ClassLabel::Mixed(_) => "M:0".to_string(),
        }
    }
}

/// Centralizer order of a nonidentity unipotent in the ambient simple group:
/// q³ on the center, 2q² on the rest of Q', 3q off Q'.
pub fn centralizer_order_unipotent(b: &Borel, a: Unipotent) -> Result<u128, FieldError> {
    let f = b.f;
    let q = f.q() as u128;
    if a == b.uni_identity() {
        return Err(FieldError::Domain(
            "the identity has the whole group as centralizer".into(),
        ));
    }
    Ok(if f.is_zero(a.t) {
        if f.is_zero(a.u) {
            q * q * q
        } else {
            2 * q * q
        }
    } else {
        3 * q
    })
}

/// ι(X(t,u,v)) = Tr_{q/3}(u·t^{−(3θ+1)} − 1) for t ≠ 0.
pub fn iota_invariant(b: &Borel, a: Unipotent) -> Result<u8, FieldError> {
    let f = b.f;
    if f.is_zero(a.t) {
        return Err(FieldError::Domain(
            "the order-9 invariant needs a nonzero t-coordinate".into(),
        ));
    }
    let t31_inv = f.inv(f.pow_3t_plus_1(a.t))?;
    Ok(f.trace_to_prime(f.sub(f.mul(a.u, t31_inv), f.one())))
}

pub fn unipotent_class_label(b: &Borel, a: Unipotent) -> ClassLabel {
    let f = b.f;
    if !f.is_zero(a.t) {
        return ClassLabel::X9(iota_invariant(b, a).expect("t is nonzero"));
    }
    if !f.is_zero(a.u) {
        return if f.quadratic_character(a.u) == 1 {
            ClassLabel::YPlus
        } else {
            ClassLabel::YMinus
        };
    }
    if !f.is_zero(a.v) {
        ClassLabel::Z
    } else {
        ClassLabel::Identity
    }
}

/// Label for an arbitrary element of B (no φ-part): unipotent labels on Q,
/// the torus pair label when the element is conjugate to h(s) with s ≠ ±1,
/// and the mixed label at s = −1.
pub fn borel_class_label(b: &Borel, a: GroupElt) -> Result<ClassLabel, FieldError> {
    let f = b.f;
    if a.j != 0 {
        return Err(FieldError::Domain(
            "class labels are defined for elements without a φ-part".into(),
        ));
    }
    if a.s == f.one() {
        return Ok(unipotent_class_label(b, a.x));
    }
    if a.s == f.neg(f.one()) {
        let (canon, _) = canonicalize_borel(b, a)?;
        let u = canon.x.u;
        return Ok(ClassLabel::Mixed(if f.is_zero(u) {
            0
        } else {
            f.quadratic_character(u)
        }));
    }
    let sinv = f.inv(a.s)?;
    Ok(ClassLabel::Torus(std::cmp::min(a.s, sinv)))
}

// ---------------------------------------------------------------------------
// power-map solvers used by the canonicalizers
// ---------------------------------------------------------------------------

fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, n as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qq = old_r / r;
        (old_r, r) = (r, old_r - qq * r);
        (old_s, s) = (s, old_s - qq * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(n as i128) as u64)
}

/// Unique w with w^{3θ−2} = c (the exponent is coprime to q−1).
pub(crate) fn solve_pow_3t_minus_2(b: &Borel, c: Fq) -> Result<Fq, FieldError> {
    let f = b.f;
    if f.is_zero(c) {
        return Err(FieldError::DivisionByZero);
    }
    let qm1 = f.q() - 1;
    let e = (3u64.pow(f.n() as u32 + 1) as i128 - 2).rem_euclid(qm1 as i128) as u64;
    let k = mod_inverse(e, qm1).expect("3θ−2 is coprime to q−1");
    let w = f.pow(c, k as i64)?;
    debug_assert_eq!(f.pow_3t_minus_2(w)?, c);
    Ok(w)
}

/// Some w with w^{1−3θ} = β; solvable exactly when β is a nonzero square
/// (the image of 1−3θ on units is the square subgroup).
pub(crate) fn solve_pow_1_minus_3t(b: &Borel, beta: Fq) -> Result<Fq, FieldError> {
    let f = b.f;
    if f.quadratic_character(beta) != 1 {
        return Err(FieldError::NoSolution(
            "the target of the 1−3θ power map must be a nonzero square".into(),
        ));
    }
    let gamma = f.sqrt(beta)?;
    let qm1 = f.q() - 1;
    let e = (1i128 - 3i128.pow(f.n() as u32 + 1)).rem_euclid(qm1 as i128) as u64;
    debug_assert_eq!(e % 2, 0);
    let e1 = e / 2;
    let d1 = qm1 / 2;
    let k = mod_inverse(e1 % d1, d1).expect("half-exponent is invertible mod (q−1)/2");
    let w = f.pow(gamma, k as i64)?;
    // (γ^k)^{e} = γ^{2(e₁·k)} = γ^{2(1 + c·d₁)} = β·(γ^{q−1})^c = β
    let out = f.pow_1_minus_3t(w)?;
    if out != beta {
        return Err(FieldError::NoSolution("power-map solve failed".into()));
    }
    Ok(w)
}

// ---------------------------------------------------------------------------
// canonical forms
// ---------------------------------------------------------------------------

/// Canonical form and substitution-verified conjugator for an element of B.
///
/// By cases on the torus coordinate: a unipotent goes to X(0,0,1), X(0,±1,0)
/// or X(1,û,0) with û the canonical coset representative of u modulo
/// t^{3θ+1}A; for s ∉ {1,−1} every coordinate dies and the form is h(s);
/// for s = −1 the form is X(0,u*,0)·h(−1) with u* ∈ {0,1,2} a square-class
/// representative.
pub fn canonicalize_borel(b: &Borel, a: GroupElt) -> Result<(GroupElt, GroupElt), FieldError> {
    let f = b.f;
    if a.j != 0 {
        return Err(FieldError::Domain(
            "canonical forms are defined for elements without a φ-part".into(),
        ));
    }
    let one = f.one();
    let mut g = b.identity();
    let mut cur = a;

    let apply = |b: &Borel, cur: &mut GroupElt, g: &mut GroupElt, step: GroupElt| {
        *cur = b.conj(*cur, step);
        *g = b.mul(*g, step);
    };

    if a.s == one {
        // unipotent canonicalization
        if cur.x == b.uni_identity() {
            return Ok((cur, g));
        }
        if f.is_zero(cur.x.t) {
            if f.is_zero(cur.x.u) {
                // center: h(v) scales v to 1
                let step = b.h(cur.x.v);
                apply(b, &mut cur, &mut g, step);
            } else {
                // kill v with X(v/u, 0, 0), then scale u to its square-class
                // representative
                let tp = f.div(cur.x.v, cur.x.u)?;
                apply(b, &mut cur, &mut g, b.from_uni(b.uni(tp, f.zero(), f.zero())));
                debug_assert!(f.is_zero(cur.x.v));
                let u0 = if f.quadratic_character(cur.x.u) == 1 {
                    one
                } else {
                    f.scalar(2)
                };
                let w = solve_pow_1_minus_3t(b, f.div(u0, cur.x.u)?)?;
                apply(b, &mut cur, &mut g, b.h(w));
            }
        } else {
            // order 9: normalize t to 1, reduce u modulo A, kill v
            let w = solve_pow_3t_minus_2(b, f.inv(cur.x.t)?)?;
            apply(b, &mut cur, &mut g, b.h(w));
            debug_assert_eq!(cur.x.t, one);
            let a_sub = lattice::kernel_a(f);
            let u_hat = a_sub.reduce(f, cur.x.u);
            let delta = f.sub(cur.x.u, u_hat);
            // conjugating by X(t',0,0) at t = 1 shifts u by t' − t'^{3θ}
            let tp = f.additive_h90_solve(delta, f.n() + 1)?;
            apply(b, &mut cur, &mut g, b.from_uni(b.uni(tp, f.zero(), f.zero())));
            debug_assert_eq!(cur.x.u, u_hat);
            // X(0,u',0) shifts v by t·u' = u'
            let up = f.neg(cur.x.v);
            apply(b, &mut cur, &mut g, b.from_uni(b.uni(f.zero(), up, f.zero())));
        }
    } else {
        // kill t: the X(t',0,0)-conjugation moves t by (s^{2−3θ} − 1)t'
        let ct = f.sub(f.pow_2_minus_3t(cur.s)?, one);
        debug_assert!(!f.is_zero(ct), "s ≠ 1 keeps the t-kill coefficient invertible");
        let tp = f.neg(f.div(cur.x.t, ct)?);
        apply(b, &mut cur, &mut g, b.from_uni(b.uni(tp, f.zero(), f.zero())));
        debug_assert!(f.is_zero(cur.x.t));
        if cur.s == f.neg(one) {
            // v moves by (s − 1)v' = v'; u is frozen up to square scaling
            let vp = f.neg(f.div(cur.x.v, f.sub(cur.s, one))?);
            apply(b, &mut cur, &mut g, b.from_uni(b.uni(f.zero(), f.zero(), vp)));
            debug_assert!(f.is_zero(cur.x.v));
            if !f.is_zero(cur.x.u) {
                let u0 = if f.quadratic_character(cur.x.u) == 1 {
                    one
                } else {
                    f.scalar(2)
                };
                let w = solve_pow_1_minus_3t(b, f.div(u0, cur.x.u)?)?;
                apply(b, &mut cur, &mut g, b.h(w));
            }
        } else {
            // full kill: u moves by (s^{3θ−1} − 1)u', v by (s − 1)v'
            let cu = f.sub(f.inv(f.pow_1_minus_3t(cur.s)?)?, one);
            let up = f.neg(f.div(cur.x.u, cu)?);
            apply(b, &mut cur, &mut g, b.from_uni(b.uni(f.zero(), up, f.zero())));
            debug_assert!(f.is_zero(cur.x.u));
            let vp = f.neg(f.div(cur.x.v, f.sub(cur.s, one))?);
            apply(b, &mut cur, &mut g, b.from_uni(b.uni(f.zero(), f.zero(), vp)));
            debug_assert_eq!(cur, b.h(a.s));
        }
    }

    // substitution check before returning
    if b.conj(a, g) != cur {
        return Err(FieldError::Domain(
            "canonicalization conjugator failed its substitution check".into(),
        ));
    }
    Ok((cur, g))
}

// ---------------------------------------------------------------------------
// subfield representatives
// ---------------------------------------------------------------------------

/// An element with the given label all of whose coordinates lie in the
/// q₀-subfield, when one exists. For the order-9 labels this requires a
/// subfield u₀ with Tr_{q/3}(u₀ − 1) = ι, which exists for every ι when the
/// tower degree is coprime to 3, and only for ι = 0 otherwise.
pub fn subfield_class_representative(
    b: &Borel,
    label: ClassLabel,
    q0: Subfield,
) -> Option<GroupElt> {
    let f = b.f;
    let one = f.one();
    let two = f.scalar(2);
    let rep = match label {
        ClassLabel::Identity => b.identity(),
        ClassLabel::Z => b.from_uni(b.uni(f.zero(), f.zero(), one)),
        ClassLabel::YPlus => b.from_uni(b.uni(f.zero(), one, f.zero())),
        ClassLabel::YMinus => b.from_uni(b.uni(f.zero(), two, f.zero())),
        ClassLabel::X9(iota) => {
            let u0 = f
                .subfield_elements(q0)
                .into_iter()
                .find(|&u| f.trace_to_prime(f.sub(u, one)) == iota)?;
            b.from_uni(b.uni(one, u0, f.zero()))
        }
        ClassLabel::Torus(s) => {
            if !f.in_subfield(s, q0) {
                return None;
            }
            b.h(s)
        }
        ClassLabel::Mixed(0) => b.h(f.neg(one)),
        ClassLabel::Mixed(chi) => {
            let u0 = if chi == 1 { one } else { two };
            b.elt(b.uni(f.zero(), u0, f.zero()), f.neg(one), 0)
        }
    };
    Some(rep)
}

/// Whether the class meets the subfield-coordinate subgroup; validated by
/// exhibiting a representative and re-deriving its label.
pub fn class_meets_subfield(b: &Borel, label: ClassLabel, q0: Subfield) -> bool {
    match subfield_class_representative(b, label, q0) {
        None => false,
        Some(rep) => {
            let f = b.f;
            let ok_coords = f.in_subfield(rep.x.t, q0)
                && f.in_subfield(rep.x.u, q0)
                && f.in_subfield(rep.x.v, q0)
                && f.in_subfield(rep.s, q0);
            let relabel = if rep.s == f.one() && rep.j == 0 {
                unipotent_class_label(b, rep.x) == label
            } else {
                borel_class_label(b, rep).map(|l| l == label).unwrap_or(false)
            };
            ok_coords && relabel
        }
    }
}

// ---------------------------------------------------------------------------
// brute-force census oracle
// ---------------------------------------------------------------------------

/// Partition of Q ∖ {1} into B-conjugation orbits, with an orbit-id lookup.
/// Only for q ≤ 27.
pub struct Census {
    pub orbits: Vec<Vec<Unipotent>>,
    orbit_id: HashMap<Unipotent, usize>,
}

impl Census {
    pub fn orbit_of(&self, a: Unipotent) -> Option<usize> {
        self.orbit_id.get(&a).copied()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }
}

pub fn brute_class_census(b: &Borel) -> Result<Census, FieldError> {
    let f = b.f;
    if f.q() > 27 {
        return Err(FieldError::Domain(format!(
            "census is capped at q = 27 (got q = {})",
            f.q()
        )));
    }
    // Conjugators generating B: one torus generator plus the coordinate lines.
    let torus_gen = f
        .units()
        .find(|&s| f.mult_order(s).unwrap() == f.q() - 1)
        .expect("the unit group is cyclic");
    let mut gens: Vec<GroupElt> = vec![b.h(torus_gen)];
    for i in 0..f.m() {
        let xi = f.from_index(3u64.pow(i as u32));
        gens.push(b.from_uni(b.uni(xi, f.zero(), f.zero())));
        gens.push(b.from_uni(b.uni(f.zero(), xi, f.zero())));
        gens.push(b.from_uni(b.uni(f.zero(), f.zero(), xi)));
    }
    let gens_with_inv: Vec<GroupElt> = gens
        .iter()
        .flat_map(|&g| [g, b.inv(g)])
        .collect();

    let mut orbit_id: HashMap<Unipotent, usize> = HashMap::new();
    let mut orbits: Vec<Vec<Unipotent>> = Vec::new();
    for start in b.unipotent_elements() {
        if start == b.uni_identity() || orbit_id.contains_key(&start) {
            continue;
        }
        let id = orbits.len();
        let mut orbit = vec![start];
        orbit_id.insert(start, id);
        let mut frontier = vec![start];
        while let Some(cur) = frontier.pop() {
            for &g in &gens_with_inv {
                let img = b.conj(b.from_uni(cur), g);
                debug_assert_eq!(img.s, f.one());
                debug_assert_eq!(img.j, 0);
                let next = img.x;
                if !orbit_id.contains_key(&next) {
                    orbit_id.insert(next, id);
                    orbit.push(next);
                    frontier.push(next);
                }
            }
        }
        orbit.sort_by_key(|u| (f.index_of(u.t), f.index_of(u.u), f.index_of(u.v)));
        orbits.push(orbit);
    }
    Ok(Census { orbits, orbit_id })
}
