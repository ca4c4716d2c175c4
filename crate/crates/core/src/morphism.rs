//! Morphisms of covered spaces and the rank-verified structure theorems.
//!
//! A cover morphism models a proper map of spaces whose target cover
//! pulls back to the source cover: both diagrams share one nerve, and
//! every simplex carries a pullback chain map from the target piece to
//! the source piece, commuting with restrictions (and with extension
//! maps when present, which is what makes the current-side pushforward
//! commute with current restrictions).
//!
//! On top of that sit the checked theorems: the degree as the factor by
//! which the unit current is pushed forward, the projection identity
//! `degree * i = push o i o pull` as exact matrices, injectivity of the
//! relative pullback certified by rank, and the blow-up dimension
//! decomposition with every hypothesis verified rather than assumed.

use std::collections::BTreeMap;

use crate::bicomplex::{bd, Bidegree, ChainMap};
use crate::cover::{relative_complex, total_complex_full, CoverDiagram, Simplex};
use crate::duality::{compare_forms_currents, dual_diagram, PairingData};
use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;

/// A morphism of covered spaces, recorded contravariantly: `source` is
/// the diagram upstairs (the domain of the map of spaces), `target` the
/// diagram downstairs, and each simplex carries the pullback from the
/// target piece to the source piece.
#[derive(Clone, Debug)]
pub struct CoverMorphism {
    pub name: String,
    pub source: CoverDiagram,
    pub target: CoverDiagram,
    pullbacks: BTreeMap<Simplex, ChainMap>,
}

impl CoverMorphism {
    pub fn new(name: impl Into<String>, source: CoverDiagram, target: CoverDiagram) -> Self {
        CoverMorphism {
            name: name.into(),
            source,
            target,
            pullbacks: BTreeMap::new(),
        }
    }

    pub fn set_pullback(&mut self, s: Simplex, map: ChainMap) {
        self.pullbacks.insert(s, map);
    }

    pub fn pullback(&self, s: &Simplex) -> Result<&ChainMap> {
        self.pullbacks.get(s).ok_or_else(|| Error::NoSuchPiece {
            name: self.name.clone(),
            label: format!("pullback for {}", s.key()),
        })
    }

    pub fn pullbacks(&self) -> impl Iterator<Item = (&Simplex, &ChainMap)> {
        self.pullbacks.iter()
    }

    /// Every violation: invalid endpoint diagrams, mismatched nerves,
    /// missing or non-chain pullbacks, and non-commuting restriction or
    /// extension squares.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (role, d) in [("source", &self.source), ("target", &self.target)] {
            let ps = d.validate();
            if !ps.is_empty() {
                problems.push(format!("{role} diagram: {}", ps.join("; ")));
            }
        }
        if self.source.index_set != self.target.index_set {
            problems.push("source and target diagrams use different index sets".into());
        }
        let src_simplices: Vec<&Simplex> = self.source.simplices().collect();
        let tgt_simplices: Vec<&Simplex> = self.target.simplices().collect();
        if src_simplices != tgt_simplices {
            problems.push("source and target diagrams have different nerves".into());
            return problems;
        }
        for s in self.source.simplices() {
            let Some(map) = self.pullbacks.get(s) else {
                problems.push(format!("missing pullback for {s}"));
                continue;
            };
            let (Ok(src_c), Ok(tgt_c)) = (self.source.complex_at(s), self.target.complex_at(s))
            else {
                continue;
            };
            if map.source.dims() != tgt_c.dims()
                || map.target.dims() != src_c.dims()
                || map.shift != bd(0, 0)
            {
                problems.push(format!(
                    "pullback for {s} does not go from the target piece to the source piece"
                ));
                continue;
            }
            if let Err(e) = map.verify() {
                problems.push(format!("pullback for {s}: {e}"));
            }
        }
        if problems.is_empty() {
            for s in self.source.simplices() {
                for (_, face) in s.faces() {
                    let through_target = self.pullbacks[s]
                        .compose(self.target.restriction(&face, s).unwrap())
                        .and_then(|one| {
                            self.source
                                .restriction(&face, s)
                                .unwrap()
                                .compose(&self.pullbacks[&face])
                                .map(|two| (one, two))
                        });
                    match through_target {
                        Ok((one, two)) if one.blocks() == two.blocks() => {}
                        _ => problems.push(format!(
                            "pullbacks do not commute with the restriction {face} -> {s}"
                        )),
                    }
                }
            }
            if self.source.has_extensions() && self.target.has_extensions() {
                for s in self.source.simplices() {
                    for (_, face) in s.faces() {
                        let through_target = self.pullbacks[&face]
                            .compose(self.target.extension(&face, s).unwrap())
                            .and_then(|one| {
                                self.source
                                    .extension(&face, s)
                                    .unwrap()
                                    .compose(&self.pullbacks[s])
                                    .map(|two| (one, two))
                            });
                        match through_target {
                            Ok((one, two)) if one.blocks() == two.blocks() => {}
                            _ => problems.push(format!(
                                "pullbacks do not commute with the extension {s} -> {face}"
                            )),
                        }
                    }
                }
            }
        }
        problems
    }

    pub fn check(&self) -> Result<()> {
        let problems = self.validate();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidMorphism {
                name: self.name.clone(),
                problems: problems.join("; "),
            })
        }
    }
}

/// Pullback on total complexes, assembled slotwise and verified.
pub fn total_pullback(m: &CoverMorphism) -> Result<ChainMap> {
    m.check()?;
    let tot_src = total_complex_full(&m.source)?;
    let tot_tgt = total_complex_full(&m.target)?;
    let mut map = ChainMap::new(tot_tgt.complex.clone(), tot_src.complex.clone(), bd(0, 0));
    let mut support: Vec<Bidegree> = tot_tgt.complex.support();
    support.extend(tot_src.complex.support());
    support.sort();
    support.dedup();
    for &at in &support {
        let mut block = SparseMatrix::new(tot_src.complex.dim_at(at), tot_tgt.complex.dim_at(at));
        for slot in tot_tgt.slots_at(at) {
            if let Some(dst) = tot_src.slot(at, &slot.simplex) {
                block.insert_block(
                    dst.offset,
                    slot.offset,
                    &m.pullback(&slot.simplex)?.block_at(slot.inner),
                );
            }
        }
        map.set_block(at, block)?;
    }
    map.verify()?;
    Ok(map)
}

/// Pullback on relative complexes: the kept-piece pullback on the first
/// block, the overlap pullback (one q lower) on the second.
pub fn relative_pullback(m: &CoverMorphism, omit_label: &str) -> Result<ChainMap> {
    m.check()?;
    let rel_src = relative_complex(&m.source, omit_label)?;
    let rel_tgt = relative_complex(&m.target, omit_label)?;
    let (_, kept, overlap) = m.target.two_set_split(omit_label)?;
    let pull_kept = m.pullback(&kept)?;
    let pull_overlap = m.pullback(&overlap)?;
    let mut map = ChainMap::new(rel_tgt.complex.clone(), rel_src.complex.clone(), bd(0, 0));
    let mut support: Vec<Bidegree> = rel_tgt.complex.support();
    support.extend(rel_src.complex.support());
    support.sort();
    support.dedup();
    for &at in &support {
        let (tgt_kept, tgt_over) = rel_tgt.block_dims(at);
        let (src_kept, src_over) = rel_src.block_dims(at);
        let mut block = SparseMatrix::new(src_kept + src_over, tgt_kept + tgt_over);
        block.insert_block(0, 0, &pull_kept.block_at(at));
        block.insert_block(src_kept, tgt_kept, &pull_overlap.block_at(at.down_q()));
        map.set_block(at, block)?;
    }
    map.verify()?;
    Ok(map)
}

/// Pushforward on relative current complexes: blockwise adjoints of the
/// pullback, from the source currents to the target currents.
pub fn relative_pushforward(m: &CoverMorphism, n: i32, omit_label: &str) -> Result<ChainMap> {
    m.check()?;
    let dual_src = dual_diagram(&m.source, n)?;
    let dual_tgt = dual_diagram(&m.target, n)?;
    let rel_src = relative_complex(&dual_src, omit_label)?;
    let rel_tgt = relative_complex(&dual_tgt, omit_label)?;
    let (_, kept, overlap) = m.target.two_set_split(omit_label)?;
    let pull_kept = m.pullback(&kept)?;
    let pull_overlap = m.pullback(&overlap)?;
    let mut map = ChainMap::new(rel_src.complex.clone(), rel_tgt.complex.clone(), bd(0, 0));
    let mut support: Vec<Bidegree> = rel_src.complex.support();
    support.extend(rel_tgt.complex.support());
    support.sort();
    support.dedup();
    for &at in &support {
        let (src_kept, src_over) = rel_src.block_dims(at);
        let (tgt_kept, tgt_over) = rel_tgt.block_dims(at);
        let mut block = SparseMatrix::new(tgt_kept + tgt_over, src_kept + src_over);
        block.insert_block(
            0,
            0,
            &pull_kept.block_at(bd(n - at.p, n - at.q)).transpose(),
        );
        block.insert_block(
            tgt_kept,
            src_kept,
            &pull_overlap
                .block_at(bd(n - at.p, n - at.q + 1))
                .transpose(),
        );
        map.set_block(at, block)
            .map_err(|_| Error::AdjointShapeMismatch {
                name: m.name.clone(),
                at,
            })?;
    }
    map.verify()?;
    Ok(map)
}

/// Source- and target-side pairings for the pieces of a morphism.
#[derive(Clone, Debug)]
pub struct MorphismPairings {
    pub source: BTreeMap<Simplex, PairingData>,
    pub target: BTreeMap<Simplex, PairingData>,
}

impl MorphismPairings {
    fn source_for(&self, m: &CoverMorphism, s: &Simplex) -> Result<&PairingData> {
        self.source.get(s).ok_or_else(|| Error::MissingBundleItem {
            kind: "source pairing".into(),
            name: format!("{} in {}", s.key(), m.name),
        })
    }

    fn target_for(&self, m: &CoverMorphism, s: &Simplex) -> Result<&PairingData> {
        self.target.get(s).ok_or_else(|| Error::MissingBundleItem {
            kind: "target pairing".into(),
            name: format!("{} in {}", s.key(), m.name),
        })
    }
}

/// The degree of a morphism over one piece: the factor by which the unit
/// current is pushed forward, `push(i_src(1)) = degree * i_tgt(1)` in the
/// dual of the top bidegree. Errors if the proportionality fails or the
/// target unit current vanishes.
pub fn compute_degree(
    m: &CoverMorphism,
    pairings: &MorphismPairings,
    piece: &Simplex,
) -> Result<Scalar> {
    let pd_src = pairings.source_for(m, piece)?;
    let pd_tgt = pairings.target_for(m, piece)?;
    if pd_src.n != pd_tgt.n {
        return Err(Error::shape("pairings disagree about the ambient degree n"));
    }
    let n = pd_src.n;
    let pull = m.pullback(piece)?;
    let unit_current_src = pd_src
        .block_at(bd(0, 0))
        .transpose()
        .mul_vec(&pd_src.unit)?;
    let pushed = pull
        .block_at(bd(n, n))
        .transpose()
        .mul_vec(&unit_current_src)
        .map_err(|_| Error::AdjointShapeMismatch {
            name: m.name.clone(),
            at: bd(0, 0),
        })?;
    let unit_current_tgt = pd_tgt
        .block_at(bd(0, 0))
        .transpose()
        .mul_vec(&pd_tgt.unit)?;
    let Some(anchor) = unit_current_tgt.iter().position(|v| !v.is_zero()) else {
        return Err(Error::DegreeUndefined {
            name: m.name.clone(),
            context: format!("the target unit current vanishes on {}", piece.key()),
        });
    };
    let ratio = &pushed[anchor]
        * &unit_current_tgt[anchor]
            .inv()
            .expect("anchor entry is nonzero");
    for (s, w) in pushed.iter().zip(&unit_current_tgt) {
        if s != &(&ratio * w) {
            return Err(Error::DegreeUndefined {
                name: m.name.clone(),
                context: format!(
                    "pushforward of the unit current is not a multiple of the target's on {}",
                    piece.key()
                ),
            });
        }
    }
    Ok(ratio)
}

/// Verify the projection identity `degree * i_tgt = push o i_src o pull`
/// as exact matrices, on every piece and every bidegree of the square.
pub fn projection_identity_check(
    m: &CoverMorphism,
    pairings: &MorphismPairings,
    degree: &Scalar,
) -> Result<()> {
    for s in m.source.simplices() {
        let pd_src = pairings.source_for(m, s)?;
        let pd_tgt = pairings.target_for(m, s)?;
        let n = pd_src.n;
        let pull = m.pullback(s)?;
        for p in 0..=n {
            for q in 0..=n {
                let at = bd(p, q);
                let lhs = pd_tgt.block_at(at).transpose().scale(degree);
                let rhs = pull
                    .block_at(bd(n - p, n - q))
                    .transpose()
                    .mul(&pd_src.block_at(at).transpose())?
                    .mul(&pull.block_at(at))?;
                if lhs != rhs {
                    return Err(Error::PreconditionFailed {
                        check: "projection identity".into(),
                        which: format!("piece {s} at {at}"),
                    });
                }
            }
        }
    }
    Ok(())
}

/// One bidegree of an injectivity certificate: the relative pullback's
/// induced map has `rank` out of a domain of dimension `domain_dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectivityEntry {
    pub at: Bidegree,
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub rank: usize,
}

impl InjectivityEntry {
    pub fn injective(&self) -> bool {
        self.rank == self.domain_dim
    }
}

/// Rank evidence that the relative pullback is injective on cohomology,
/// together with the degree that made the argument applicable.
#[derive(Clone, Debug)]
pub struct InjectivityCertificate {
    pub degree: Scalar,
    pub entries: Vec<InjectivityEntry>,
}

impl InjectivityCertificate {
    pub fn all_injective(&self) -> bool {
        self.entries.iter().all(InjectivityEntry::injective)
    }
}

/// Check injectivity of the relative pullback on cohomology for a
/// morphism of two-set-covered spaces. Preconditions are verified first:
/// nonzero degree over the kept piece, the projection identity on every
/// piece, and the forms-versus-currents equivalence on both covers. The
/// conclusion itself is then certified by direct rank computation.
pub fn check_relative_injectivity(
    m: &CoverMorphism,
    pairings: &MorphismPairings,
    omit_label: &str,
) -> Result<InjectivityCertificate> {
    m.check()?;
    let (_, kept, _) = m.target.two_set_split(omit_label)?;
    let degree = compute_degree(m, pairings, &kept)?;
    if degree.is_zero() {
        return Err(Error::PreconditionFailed {
            check: "degree".into(),
            which: format!("degree of {} over {} is zero", m.name, kept.key()),
        });
    }
    projection_identity_check(m, pairings, &degree)?;
    if !compare_forms_currents(&m.source, &pairings.source, omit_label)?.equivalence_holds() {
        return Err(Error::PreconditionFailed {
            check: "forms-currents equivalence".into(),
            which: "source cover".into(),
        });
    }
    if !compare_forms_currents(&m.target, &pairings.target, omit_label)?.equivalence_holds() {
        return Err(Error::PreconditionFailed {
            check: "forms-currents equivalence".into(),
            which: "target cover".into(),
        });
    }
    let pull = relative_pullback(m, omit_label)?;
    let mut support: Vec<Bidegree> = pull.source.support();
    support.extend(pull.target.support());
    support.sort();
    support.dedup();
    let mut entries = Vec::new();
    for &at in &support {
        let induced = pull.induced_map(at)?;
        entries.push(InjectivityEntry {
            at,
            domain_dim: induced.cols(),
            codomain_dim: induced.rows(),
            rank: induced.rank(),
        });
    }
    Ok(InjectivityCertificate { degree, entries })
}

/// One bidegree of a blow-up decomposition: global and relative
/// cohomology dimensions upstairs and downstairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupEntry {
    pub at: Bidegree,
    pub global_source: usize,
    pub global_target: usize,
    pub relative_source: usize,
    pub relative_target: usize,
}

impl BlowupEntry {
    /// The decomposition identity: upstairs global cohomology is the
    /// downstairs one plus the growth of the relative part.
    pub fn identity_holds(&self) -> bool {
        self.global_source + self.relative_target == self.global_target + self.relative_source
    }

    /// Dimension of the quotient `H(source) / pull(H(target))` predicted
    /// by the decomposition.
    pub fn quotient_dim(&self) -> usize {
        self.global_source - self.global_target
    }
}

/// Outcome of checking a blow-up style decomposition: either every
/// hypothesis and the dimension identity verified, or the list of
/// failures found.
#[derive(Clone, Debug)]
pub enum BlowupOutcome {
    Certified { entries: Vec<BlowupEntry> },
    Rejected { witnesses: Vec<String> },
}

impl BlowupOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, BlowupOutcome::Certified { .. })
    }
}

/// Verify the hypotheses of the blow-up decomposition by rank and, when
/// they hold, certify the dimension identity
/// `dim H(src) = dim H(tgt) + (dim H_rel(src) - dim H_rel(tgt))` at every
/// bidegree. Hypotheses per bidegree: the pullback over the omitted piece
/// induces an isomorphism there and a surjection one q below, and both
/// the total and relative pullbacks are injective on cohomology.
pub fn blowup_decomposition(m: &CoverMorphism, omit_label: &str) -> Result<BlowupOutcome> {
    m.check()?;
    let (omitted, _, _) = m.target.two_set_split(omit_label)?;
    let pull_omitted = m.pullback(&omitted)?;
    let total = total_pullback(m)?;
    let relative = relative_pullback(m, omit_label)?;
    let mut support: Vec<Bidegree> = total.source.support();
    support.extend(total.target.support());
    support.extend(relative.source.support());
    support.extend(relative.target.support());
    support.sort();
    support.dedup();
    let mut witnesses = Vec::new();
    for &at in &support {
        let u0 = pull_omitted.induced_map(at)?;
        if u0.rows() != u0.cols() || u0.rank() != u0.rows() {
            witnesses.push(format!(
                "pullback over the omitted piece is not an isomorphism on cohomology at {at}"
            ));
        }
        let u0_below = pull_omitted.induced_map(at.down_q())?;
        if u0_below.rank() != u0_below.rows() {
            witnesses.push(format!(
                "pullback over the omitted piece is not surjective on cohomology at {}",
                at.down_q()
            ));
        }
        let glob = total.induced_map(at)?;
        if glob.rank() != glob.cols() {
            witnesses.push(format!(
                "total pullback is not injective on cohomology at {at}"
            ));
        }
        let rel = relative.induced_map(at)?;
        if rel.rank() != rel.cols() {
            witnesses.push(format!(
                "relative pullback is not injective on cohomology at {at}"
            ));
        }
    }
    if !witnesses.is_empty() {
        return Ok(BlowupOutcome::Rejected { witnesses });
    }
    // the pullback chain maps run contravariantly: their target complex
    // lives on the source space
    let mut entries = Vec::new();
    for &at in &support {
        entries.push(BlowupEntry {
            at,
            global_source: total.target.cohomology(at)?.dim,
            global_target: total.source.cohomology(at)?.dim,
            relative_source: relative.target.cohomology(at)?.dim,
            relative_target: relative.source.cohomology(at)?.dim,
        });
    }
    if let Some(bad) = entries.iter().find(|e| !e.identity_holds()) {
        return Ok(BlowupOutcome::Rejected {
            witnesses: vec![format!(
                "hypotheses hold but the dimension identity fails at {}: {} + {} != {} + {}",
                bad.at,
                bad.global_source,
                bad.relative_target,
                bad.global_target,
                bad.relative_source
            )],
        });
    }
    Ok(BlowupOutcome::Certified { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bicomplex::BigradedComplex;

    fn corners(name: &str) -> BigradedComplex {
        let mut c = BigradedComplex::new(name);
        for at in [bd(0, 0), bd(1, 0), bd(0, 1), bd(1, 1)] {
            c.set_dim(at, 1);
        }
        c
    }

    fn corner_pairing(c: &BigradedComplex) -> PairingData {
        let mut pd = PairingData::new(c.clone(), 1, vec![Scalar::one()]).unwrap();
        pd.set_block(bd(0, 0), SparseMatrix::identity(1)).unwrap();
        pd.set_block(bd(1, 0), SparseMatrix::identity(1)).unwrap();
        pd.set_block(bd(0, 1), SparseMatrix::identity(1).neg())
            .unwrap();
        pd.set_block(bd(1, 1), SparseMatrix::identity(1)).unwrap();
        pd
    }

    fn self_cover(name: &str, c: &BigradedComplex) -> CoverDiagram {
        let mut d = CoverDiagram::new(name, vec!["U0".into(), "U1".into()]);
        let overlap = Simplex::new(vec![0, 1]);
        for s in [Simplex::vertex(0), Simplex::vertex(1), overlap.clone()] {
            d.set_piece(s, c.clone());
        }
        for v in [Simplex::vertex(0), Simplex::vertex(1)] {
            d.set_restriction(v.clone(), overlap.clone(), ChainMap::identity(c));
            d.set_extension(v, overlap.clone(), ChainMap::identity(c));
        }
        d
    }

    fn identity_morphism() -> (CoverMorphism, MorphismPairings) {
        let c = corners("c");
        let d = self_cover("cover", &c);
        let mut m = CoverMorphism::new("id", d.clone(), d.clone());
        for s in d.simplices() {
            m.set_pullback(s.clone(), ChainMap::identity(&c));
        }
        let mut source = BTreeMap::new();
        let mut target = BTreeMap::new();
        for s in d.simplices() {
            source.insert(s.clone(), corner_pairing(&c));
            target.insert(s.clone(), corner_pairing(&c));
        }
        (m, MorphismPairings { source, target })
    }

    /// Two disjoint copies of the corner model mapping down to one copy.
    fn two_sheet_morphism() -> (CoverMorphism, MorphismPairings) {
        let downstairs = corners("down");
        let upstairs = downstairs.direct_sum(&corners("other"), "up");
        let src = self_cover("upcover", &upstairs);
        let tgt = self_cover("downcover", &downstairs);
        let mut m = CoverMorphism::new("twosheet", src.clone(), tgt.clone());
        let mut diag = ChainMap::new(downstairs.clone(), upstairs.clone(), bd(0, 0));
        for &at in &downstairs.support() {
            diag.set_block(
                at,
                SparseMatrix::from_rows(vec![vec![Scalar::one()], vec![Scalar::one()]]),
            )
            .unwrap();
        }
        for s in src.simplices() {
            m.set_pullback(s.clone(), diag.clone());
        }
        let mut up_pd = PairingData::new(upstairs.clone(), 1, vec![Scalar::one(); 2]).unwrap();
        for (at, sign) in [
            (bd(0, 0), Scalar::one()),
            (bd(1, 0), Scalar::one()),
            (bd(0, 1), Scalar::from_int(-1)),
            (bd(1, 1), Scalar::one()),
        ] {
            let mut block = SparseMatrix::new(2, 2);
            block.set(0, 0, sign.clone());
            block.set(1, 1, sign);
            up_pd.set_block(at, block).unwrap();
        }
        let mut source = BTreeMap::new();
        let mut target = BTreeMap::new();
        for s in src.simplices() {
            source.insert(s.clone(), up_pd.clone());
            target.insert(s.clone(), corner_pairing(&downstairs));
        }
        (m, MorphismPairings { source, target })
    }

    #[test]
    fn identity_morphism_has_degree_one() {
        let (m, pairings) = identity_morphism();
        m.check().unwrap();
        let kept = Simplex::vertex(1);
        let degree = compute_degree(&m, &pairings, &kept).unwrap();
        assert_eq!(degree, Scalar::one());
        projection_identity_check(&m, &pairings, &degree).unwrap();
    }

    #[test]
    fn two_sheets_have_degree_two() {
        let (m, pairings) = two_sheet_morphism();
        m.check().unwrap();
        let degree = compute_degree(&m, &pairings, &Simplex::vertex(1)).unwrap();
        assert_eq!(degree, Scalar::from_int(2));
        projection_identity_check(&m, &pairings, &degree).unwrap();
        let cert = check_relative_injectivity(&m, &pairings, "U0").unwrap();
        assert_eq!(cert.degree, Scalar::from_int(2));
        assert!(cert.all_injective());
    }

    #[test]
    fn scaled_pullback_fails_the_projection_identity() {
        let (mut m, pairings) = two_sheet_morphism();
        let scaled: Vec<(Simplex, ChainMap)> = m
            .pullbacks()
            .map(|(s, f)| {
                let mut g = f.clone();
                for &at in &f.source.support() {
                    g.set_block(at, f.block_at(at).scale(&Scalar::from_int(2)))
                        .unwrap();
                }
                (s.clone(), g)
            })
            .collect();
        for (s, g) in scaled {
            m.set_pullback(s, g);
        }
        m.check().unwrap();
        let degree = compute_degree(&m, &pairings, &Simplex::vertex(1)).unwrap();
        assert_eq!(degree, Scalar::from_int(4));
        assert!(matches!(
            projection_identity_check(&m, &pairings, &degree),
            Err(Error::PreconditionFailed { check, .. }) if check == "projection identity"
        ));
    }

    #[test]
    fn total_and_relative_pullbacks_verify() {
        let (m, _) = two_sheet_morphism();
        let total = total_pullback(&m).unwrap();
        assert_eq!(total.source.dim_at(bd(0, 1)), 3);
        assert_eq!(total.target.dim_at(bd(0, 1)), 6);
        let rel = relative_pullback(&m, "U0").unwrap();
        assert_eq!(rel.source.dim_at(bd(0, 1)), 2);
        assert_eq!(rel.target.dim_at(bd(0, 1)), 4);
        let push = relative_pushforward(&m, 1, "U0").unwrap();
        // adjoints of the mirrored pullback blocks, componentwise: the
        // kept block mirrors (p,q) -> (1-p,1-q), the overlap block one q up
        assert_eq!(
            push.block_at(bd(0, 0)),
            SparseMatrix::from_rows(vec![vec![Scalar::one(), Scalar::one()]])
        );
        let expected = SparseMatrix::from_triples(
            2,
            4,
            vec![
                (0, 0, Scalar::one()),
                (0, 1, Scalar::one()),
                (1, 2, Scalar::one()),
                (1, 3, Scalar::one()),
            ],
        )
        .unwrap();
        assert_eq!(push.block_at(bd(0, 1)), expected);
    }

    #[test]
    fn identity_blowup_is_certified_with_trivial_quotient() {
        let (m, _) = identity_morphism();
        match blowup_decomposition(&m, "U0").unwrap() {
            BlowupOutcome::Certified { entries } => {
                assert!(!entries.is_empty());
                for e in &entries {
                    assert!(e.identity_holds());
                    assert_eq!(e.quotient_dim(), 0);
                }
            }
            BlowupOutcome::Rejected { witnesses } => panic!("rejected: {witnesses:?}"),
        }
    }

    #[test]
    fn zero_pullback_is_rejected_with_witnesses() {
        let (mut m, _) = identity_morphism();
        let c = corners("c");
        for s in m.source.simplices().cloned().collect::<Vec<_>>() {
            m.set_pullback(s, ChainMap::zero(&c, &c, bd(0, 0)));
        }
        m.check().unwrap();
        match blowup_decomposition(&m, "U0").unwrap() {
            BlowupOutcome::Rejected { witnesses } => {
                assert!(witnesses.iter().any(|w| w.contains("omitted piece")));
                assert!(witnesses.iter().any(|w| w.contains("injective")));
            }
            BlowupOutcome::Certified { .. } => panic!("expected rejection"),
        }
    }

    #[test]
    fn mismatched_nerves_are_invalid() {
        let c = corners("c");
        let d = self_cover("cover", &c);
        let mut smaller = CoverDiagram::new("small", vec!["U0".into()]);
        smaller.set_piece(Simplex::vertex(0), c.clone());
        let m = CoverMorphism::new("bad", d, smaller);
        assert!(matches!(m.check(), Err(Error::InvalidMorphism { .. })));
    }
}
