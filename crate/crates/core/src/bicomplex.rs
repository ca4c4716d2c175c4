//! Finite bigraded complexes with a differential of bidegree (0, 1),
//! chain maps between them, cohomology with deterministic representative
//! bases, induced maps, and mapping cones.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::matrix::{Echelon, SparseMatrix, Subspace};
use crate::scalar::Scalar;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bidegree {
    pub p: i32,
    pub q: i32,
}

pub fn bd(p: i32, q: i32) -> Bidegree {
    Bidegree { p, q }
}

impl Bidegree {
    pub fn up_q(self) -> Bidegree {
        bd(self.p, self.q + 1)
    }

    pub fn down_q(self) -> Bidegree {
        bd(self.p, self.q - 1)
    }
}

impl Add for Bidegree {
    type Output = Bidegree;
    fn add(self, rhs: Bidegree) -> Bidegree {
        bd(self.p + rhs.p, self.q + rhs.q)
    }
}

impl Sub for Bidegree {
    type Output = Bidegree;
    fn sub(self, rhs: Bidegree) -> Bidegree {
        bd(self.p - rhs.p, self.q - rhs.q)
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

impl fmt::Debug for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// A finite-dimensional bigraded vector space with a differential raising
/// q by one. Bidegrees without a declared dimension are zero-dimensional
/// and all differentials touching them are zero maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedComplex {
    pub name: String,
    dims: BTreeMap<Bidegree, usize>,
    diff: BTreeMap<Bidegree, SparseMatrix>,
}

impl BigradedComplex {
    pub fn new(name: impl Into<String>) -> Self {
        BigradedComplex {
            name: name.into(),
            dims: BTreeMap::new(),
            diff: BTreeMap::new(),
        }
    }

    pub fn set_dim(&mut self, at: Bidegree, dim: usize) {
        if dim == 0 {
            self.dims.remove(&at);
        } else {
            self.dims.insert(at, dim);
        }
    }

    pub fn dim_at(&self, at: Bidegree) -> usize {
        self.dims.get(&at).copied().unwrap_or(0)
    }

    /// Install the differential out of `at`. The block must map the space
    /// at `at` to the space at `at + (0,1)`.
    pub fn set_diff(&mut self, at: Bidegree, m: SparseMatrix) -> Result<()> {
        let want_rows = self.dim_at(at.up_q());
        let want_cols = self.dim_at(at);
        if m.rows() != want_rows || m.cols() != want_cols {
            return Err(Error::BlockShape {
                at,
                context: format!(
                    "differential must be {}x{}, got {}x{}",
                    want_rows,
                    want_cols,
                    m.rows(),
                    m.cols()
                ),
            });
        }
        if m.is_zero() {
            self.diff.remove(&at);
        } else {
            self.diff.insert(at, m);
        }
        Ok(())
    }

    pub fn diff_at(&self, at: Bidegree) -> SparseMatrix {
        self.diff
            .get(&at)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::new(self.dim_at(at.up_q()), self.dim_at(at)))
    }

    /// Bidegrees with a nonzero space, sorted.
    pub fn support(&self) -> Vec<Bidegree> {
        self.dims.keys().copied().collect()
    }

    pub fn dims(&self) -> &BTreeMap<Bidegree, usize> {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    /// Componentwise (min, max) of the support, or `None` when empty.
    pub fn bounds(&self) -> Option<(Bidegree, Bidegree)> {
        let mut it = self.dims.keys();
        let first = *it.next()?;
        let mut lo = first;
        let mut hi = first;
        for &b in it {
            lo = bd(lo.p.min(b.p), lo.q.min(b.q));
            hi = bd(hi.p.max(b.p), hi.q.max(b.q));
        }
        Some((lo, hi))
    }

    /// Every violation of the complex axioms, with its position.
    pub fn validate(&self) -> ValidationReport {
        let mut problems = Vec::new();
        for (&at, m) in &self.diff {
            let want_rows = self.dim_at(at.up_q());
            let want_cols = self.dim_at(at);
            if m.rows() != want_rows || m.cols() != want_cols {
                problems.push(format!(
                    "differential at {at} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    want_rows,
                    want_cols
                ));
            }
        }
        if problems.is_empty() {
            for &at in self.diff.keys() {
                let next = self.diff_at(at.up_q());
                let square = next.mul(&self.diff_at(at)).expect("shapes checked");
                if !square.is_zero() {
                    problems.push(format!("d o d is nonzero starting at {at}"));
                }
            }
        }
        ValidationReport { problems }
    }

    fn check_valid_near(&self, at: Bidegree) -> Result<()> {
        let below = self.diff_at(at.down_q());
        let here = self.diff_at(at);
        let above = self.diff_at(at.up_q());
        let first = here.mul(&below).map_err(|_| Error::InvalidComplex {
            name: self.name.clone(),
            problems: format!("differential shapes near {at} do not match"),
        })?;
        let second = above.mul(&here).map_err(|_| Error::InvalidComplex {
            name: self.name.clone(),
            problems: format!("differential shapes near {at} do not match"),
        })?;
        if !first.is_zero() || !second.is_zero() {
            return Err(Error::InvalidComplex {
                name: self.name.clone(),
                problems: format!("d o d is nonzero near {at}"),
            });
        }
        Ok(())
    }

    /// Cohomology at one bidegree: kernel of the outgoing differential
    /// modulo image of the incoming one. Representatives are chosen
    /// deterministically from the echelon kernel basis.
    pub fn cohomology(&self, at: Bidegree) -> Result<CohomologyGroup> {
        self.check_valid_near(at)?;
        let cocycles = self.diff_at(at).kernel_basis();
        let coboundaries = self.diff_at(at.down_q()).image_basis();
        let b = coboundaries.matrix();
        let k = cocycles.matrix();
        let joint = SparseMatrix::hstack(&[&b, &k])?;
        let Echelon { pivots, .. } = joint.rref();
        let mut representatives = Vec::new();
        for &(_, col) in &pivots {
            if col >= b.cols() {
                representatives.push(cocycles.basis[col - b.cols()].clone());
            }
        }
        Ok(CohomologyGroup {
            at,
            dim: representatives.len(),
            representatives: Subspace {
                ambient_dim: self.dim_at(at),
                basis: representatives,
            },
            coboundaries,
        })
    }

    /// Alternating sum over q of the space dimensions in column p. For a
    /// valid complex this equals the same alternating sum of cohomology
    /// dimensions.
    pub fn euler_characteristic(&self, p: i32) -> i64 {
        self.dims
            .iter()
            .filter(|(b, _)| b.p == p)
            .map(|(b, &d)| {
                if b.q.rem_euclid(2) == 0 {
                    d as i64
                } else {
                    -(d as i64)
                }
            })
            .sum()
    }

    /// Block sum of two complexes; spaces concatenate (`self` first) and
    /// differentials act blockwise.
    pub fn direct_sum(&self, other: &BigradedComplex, name: impl Into<String>) -> BigradedComplex {
        let mut out = BigradedComplex::new(name);
        let mut support: Vec<Bidegree> = self.support();
        support.extend(other.support());
        support.sort();
        support.dedup();
        for &at in &support {
            out.set_dim(at, self.dim_at(at) + other.dim_at(at));
        }
        for &at in &support {
            let a = self.diff_at(at);
            let b = other.diff_at(at);
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let mut m = SparseMatrix::new(out.dim_at(at.up_q()), out.dim_at(at));
            m.insert_block(0, 0, &a);
            m.insert_block(self.dim_at(at.up_q()), self.dim_at(at), &b);
            out.set_diff(at, m).expect("block sum shapes agree");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn into_result(self, name: &str) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidComplex {
                name: name.to_string(),
                problems: self.problems.join("; "),
            })
        }
    }
}

/// Cohomology at one bidegree with a deterministic representative basis.
/// `representatives` extends a basis of the coboundaries to one of the
/// cocycles; classes are coordinatized against that choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyGroup {
    pub at: Bidegree,
    pub dim: usize,
    pub representatives: Subspace,
    pub coboundaries: Subspace,
}

impl CohomologyGroup {
    /// Coordinates of the class of `cocycle` in the representative basis.
    pub fn class_coordinates(&self, cocycle: &[Scalar]) -> Result<Vec<Scalar>> {
        if cocycle.len() != self.representatives.ambient_dim {
            return Err(Error::ElementShape {
                at: self.at,
                got: cocycle.len(),
                want: self.representatives.ambient_dim,
            });
        }
        let r = self.representatives.matrix();
        let b = self.coboundaries.matrix();
        let joint = SparseMatrix::hstack(&[&r, &b])?;
        let coords = joint
            .solve(cocycle)
            .ok_or(Error::NotInCocycleSpace { at: self.at })?;
        Ok(coords[..self.dim].to_vec())
    }
}

/// A map of bigraded complexes. `blocks[at]` sends the source space at
/// `at` to the target space at `at + shift`. The chain condition carries
/// the sign `(-1)^(shift.q)`: maps with an odd q-shift anticommute with
/// the differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub source: BigradedComplex,
    pub target: BigradedComplex,
    pub shift: Bidegree,
    blocks: BTreeMap<Bidegree, SparseMatrix>,
}

impl ChainMap {
    pub fn new(source: BigradedComplex, target: BigradedComplex, shift: Bidegree) -> Self {
        ChainMap {
            source,
            target,
            shift,
            blocks: BTreeMap::new(),
        }
    }

    pub fn identity(c: &BigradedComplex) -> Self {
        let mut f = ChainMap::new(c.clone(), c.clone(), bd(0, 0));
        for &at in &c.support() {
            f.blocks.insert(at, SparseMatrix::identity(c.dim_at(at)));
        }
        f
    }

    pub fn zero(source: &BigradedComplex, target: &BigradedComplex, shift: Bidegree) -> Self {
        ChainMap::new(source.clone(), target.clone(), shift)
    }

    pub fn set_block(&mut self, at: Bidegree, m: SparseMatrix) -> Result<()> {
        let want_rows = self.target.dim_at(at + self.shift);
        let want_cols = self.source.dim_at(at);
        if m.rows() != want_rows || m.cols() != want_cols {
            return Err(Error::BlockShape {
                at,
                context: format!(
                    "chain map block must be {}x{}, got {}x{}",
                    want_rows,
                    want_cols,
                    m.rows(),
                    m.cols()
                ),
            });
        }
        if m.is_zero() {
            self.blocks.remove(&at);
        } else {
            self.blocks.insert(at, m);
        }
        Ok(())
    }

    pub fn block_at(&self, at: Bidegree) -> SparseMatrix {
        self.blocks.get(&at).cloned().unwrap_or_else(|| {
            SparseMatrix::new(self.target.dim_at(at + self.shift), self.source.dim_at(at))
        })
    }

    pub fn blocks(&self) -> &BTreeMap<Bidegree, SparseMatrix> {
        &self.blocks
    }

    fn chain_sign(&self) -> Scalar {
        if self.shift.q.rem_euclid(2) == 0 {
            Scalar::one()
        } else {
            Scalar::from_int(-1)
        }
    }

    /// Verify the chain condition at every bidegree of the source support.
    pub fn verify(&self) -> Result<()> {
        let mut checked: Vec<Bidegree> = self.source.support();
        checked.extend(self.blocks.keys().copied());
        checked.sort();
        checked.dedup();
        for &at in &checked {
            let left = self
                .target
                .diff_at(at + self.shift)
                .mul(&self.block_at(at))
                .map_err(|_| Error::NotAChainMap { at })?;
            let right = self
                .block_at(at.up_q())
                .mul(&self.source.diff_at(at))
                .map_err(|_| Error::NotAChainMap { at })?
                .scale(&self.chain_sign());
            if left != right {
                return Err(Error::NotAChainMap { at });
            }
        }
        Ok(())
    }

    /// `self` after `earlier`; shifts add.
    pub fn compose(&self, earlier: &ChainMap) -> Result<ChainMap> {
        if earlier.target.dims() != self.source.dims() {
            return Err(Error::shape(format!(
                "compose: {} does not end where {} begins",
                earlier.target.name, self.source.name
            )));
        }
        let mut out = ChainMap::new(
            earlier.source.clone(),
            self.target.clone(),
            earlier.shift + self.shift,
        );
        for &at in &earlier.source.support() {
            let block = self
                .block_at(at + earlier.shift)
                .mul(&earlier.block_at(at))?;
            out.set_block(at, block)?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.source.dims() != other.source.dims()
            || self.target.dims() != other.target.dims()
            || self.shift != other.shift
        {
            return Err(Error::shape("adding chain maps of different shapes"));
        }
        let mut out = ChainMap::new(self.source.clone(), self.target.clone(), self.shift);
        let mut support: Vec<Bidegree> = self.blocks.keys().copied().collect();
        support.extend(other.blocks.keys().copied());
        support.sort();
        support.dedup();
        for &at in &support {
            out.set_block(at, self.block_at(at).add(&other.block_at(at))?)?;
        }
        Ok(out)
    }

    /// The matrix induced on cohomology, written in the deterministic
    /// representative bases of source and target.
    pub fn induced_map(&self, at: Bidegree) -> Result<SparseMatrix> {
        self.verify()?;
        let src = self.source.cohomology(at)?;
        let tgt = self.target.cohomology(at + self.shift)?;
        let block = self.block_at(at);
        let mut out = SparseMatrix::new(tgt.dim, src.dim);
        for (j, rep) in src.representatives.basis.iter().enumerate() {
            let image = block.mul_vec(rep)?;
            let coords = tgt.class_coordinates(&image)?;
            for (i, v) in coords.into_iter().enumerate() {
                if !v.is_zero() {
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Whether the induced map at `at` is an isomorphism, by direct rank.
    pub fn is_iso_on_cohomology(&self, at: Bidegree) -> Result<bool> {
        let m = self.induced_map(at)?;
        Ok(m.rows() == m.cols() && m.rank() == m.rows())
    }
}

/// Free function form of [`ChainMap::induced_map`].
pub fn induced_map(f: &ChainMap, at: Bidegree) -> Result<SparseMatrix> {
    f.induced_map(at)
}

/// Mapping cone of a bidegree-preserving chain map. The source sits inside
/// the cone with its q-degree lowered by one, and the differential is
/// `D(a, b) = (d a + f b, -d b)` for `a` in the target and `b` in the
/// shifted source copy.
pub fn cone(f: &ChainMap) -> Result<BigradedComplex> {
    if f.shift != bd(0, 0) {
        return Err(Error::shape(format!(
            "cone of a map with shift {}",
            f.shift
        )));
    }
    f.verify()?;
    let mut out = BigradedComplex::new(format!("cone({})", f.source.name));
    let mut support: Vec<Bidegree> = f.target.support();
    support.extend(f.source.support().iter().map(|&b| b.down_q()));
    support.sort();
    support.dedup();
    for &at in &support {
        out.set_dim(at, f.target.dim_at(at) + f.source.dim_at(at.up_q()));
    }
    for &at in &support {
        let dt = f.target.diff_at(at);
        let fb = f.block_at(at.up_q());
        let ds = f.source.diff_at(at.up_q()).neg();
        let mut m = SparseMatrix::new(out.dim_at(at.up_q()), out.dim_at(at));
        m.insert_block(0, 0, &dt);
        m.insert_block(0, f.target.dim_at(at), &fb);
        m.insert_block(f.target.dim_at(at.up_q()), f.target.dim_at(at), &ds);
        out.set_diff(at, m)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// All differentials zero, dimension one at each of the four corners
    /// of the unit square.
    fn square_complex() -> BigradedComplex {
        let mut c = BigradedComplex::new("square");
        for at in [bd(0, 0), bd(1, 0), bd(0, 1), bd(1, 1)] {
            c.set_dim(at, 1);
        }
        c
    }

    /// 0 -> F -> F -> 0 in column 0, differential the identity.
    fn acyclic_interval() -> BigradedComplex {
        let mut c = BigradedComplex::new("interval");
        c.set_dim(bd(0, 0), 1);
        c.set_dim(bd(0, 1), 1);
        c.set_diff(bd(0, 0), SparseMatrix::identity(1)).unwrap();
        c
    }

    #[test]
    fn validate_accepts_zero_differentials() {
        assert!(square_complex().validate().is_valid());
        assert!(acyclic_interval().validate().is_valid());
    }

    #[test]
    fn validate_names_broken_square() {
        let mut c = BigradedComplex::new("bad");
        for q in 0..3 {
            c.set_dim(bd(0, q), 1);
        }
        c.set_diff(bd(0, 0), SparseMatrix::identity(1)).unwrap();
        c.set_diff(bd(0, 1), SparseMatrix::identity(1)).unwrap();
        let report = c.validate();
        assert!(!report.is_valid());
        assert!(report.problems[0].contains("(0, 0)"));
    }

    #[test]
    fn set_diff_rejects_bad_shape() {
        let mut c = square_complex();
        let r = c.set_diff(bd(0, 0), SparseMatrix::identity(2));
        assert!(matches!(r, Err(Error::BlockShape { .. })));
    }

    #[test]
    fn cohomology_of_zero_differential_complex_is_the_spaces() {
        let c = square_complex();
        for at in [bd(0, 0), bd(1, 0), bd(0, 1), bd(1, 1)] {
            assert_eq!(c.cohomology(at).unwrap().dim, 1);
        }
        assert_eq!(c.cohomology(bd(2, 2)).unwrap().dim, 0);
    }

    #[test]
    fn cohomology_of_acyclic_interval_vanishes() {
        let c = acyclic_interval();
        assert_eq!(c.cohomology(bd(0, 0)).unwrap().dim, 0);
        assert_eq!(c.cohomology(bd(0, 1)).unwrap().dim, 0);
    }

    #[test]
    fn cohomology_rejects_invalid_complex() {
        let mut c = BigradedComplex::new("bad");
        for q in 0..3 {
            c.set_dim(bd(0, q), 1);
        }
        c.set_diff(bd(0, 0), SparseMatrix::identity(1)).unwrap();
        c.set_diff(bd(0, 1), SparseMatrix::identity(1)).unwrap();
        assert!(matches!(
            c.cohomology(bd(0, 1)),
            Err(Error::InvalidComplex { .. })
        ));
    }

    #[test]
    fn representatives_extend_coboundaries() {
        // dims 2 at (0,0), 2 at (0,1); d maps e0 to e0, kills e1.
        let mut c = BigradedComplex::new("mixed");
        c.set_dim(bd(0, 0), 2);
        c.set_dim(bd(0, 1), 2);
        c.set_diff(
            bd(0, 0),
            SparseMatrix::from_triples(2, 2, vec![(0, 0, Scalar::one())]).unwrap(),
        )
        .unwrap();
        let h = c.cohomology(bd(0, 1)).unwrap();
        assert_eq!(h.dim, 1);
        // the class of e1 has coordinate 1; the class of e0 is zero
        let e1 = vec![Scalar::zero(), Scalar::one()];
        assert_eq!(h.class_coordinates(&e1).unwrap(), vec![Scalar::one()]);
        let e0 = vec![Scalar::one(), Scalar::zero()];
        assert_eq!(h.class_coordinates(&e0).unwrap(), vec![Scalar::zero()]);
    }

    #[test]
    fn induced_map_of_identity_is_identity() {
        let c = square_complex();
        let id = ChainMap::identity(&c);
        for at in c.support() {
            assert_eq!(id.induced_map(at).unwrap(), SparseMatrix::identity(1));
        }
    }

    #[test]
    fn induced_map_of_zero_is_zero() {
        let c = square_complex();
        let z = ChainMap::zero(&c, &c, bd(0, 0));
        let m = z.induced_map(bd(0, 0)).unwrap();
        assert!(m.is_zero());
        assert_eq!((m.rows(), m.cols()), (1, 1));
    }

    #[test]
    fn induced_map_of_quasi_isomorphism_is_iso() {
        // B: dims 2 at (0,0), 1 at (0,1), d = [0 1]; H(B) = <e0> at (0,0).
        let mut b = BigradedComplex::new("B");
        b.set_dim(bd(0, 0), 2);
        b.set_dim(bd(0, 1), 1);
        b.set_diff(
            bd(0, 0),
            SparseMatrix::from_triples(1, 2, vec![(0, 1, Scalar::one())]).unwrap(),
        )
        .unwrap();
        let mut a = BigradedComplex::new("A");
        a.set_dim(bd(0, 0), 1);
        let mut f = ChainMap::new(a, b, bd(0, 0));
        f.set_block(
            bd(0, 0),
            SparseMatrix::from_triples(2, 1, vec![(0, 0, Scalar::one())]).unwrap(),
        )
        .unwrap();
        f.verify().unwrap();
        assert!(f.is_iso_on_cohomology(bd(0, 0)).unwrap());
        assert!(f.is_iso_on_cohomology(bd(0, 1)).unwrap());
    }

    #[test]
    fn verify_rejects_non_chain_map() {
        let a = square_complex();
        let b = acyclic_interval();
        let mut f = ChainMap::new(a, b, bd(0, 0));
        f.set_block(bd(0, 0), SparseMatrix::identity(1)).unwrap();
        // d_target o f is the identity at (0,0) but f o d_source is zero
        assert!(matches!(f.verify(), Err(Error::NotAChainMap { .. })));
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = square_complex();
        let id = ChainMap::identity(&c);
        let cone = cone(&id).unwrap();
        assert!(cone.validate().is_valid());
        for p in 0..2 {
            for q in -1..2 {
                assert_eq!(cone.cohomology(bd(p, q)).unwrap().dim, 0, "at ({p},{q})");
            }
        }
    }

    #[test]
    fn cone_of_zero_sums_with_shift() {
        let c = square_complex();
        let z = ChainMap::zero(&c, &c, bd(0, 0));
        let cone = cone(&z).unwrap();
        for &at in &c.support() {
            let expected = c.cohomology(at).unwrap().dim + c.cohomology(at.up_q()).unwrap().dim;
            assert_eq!(cone.cohomology(at).unwrap().dim, expected);
        }
    }

    #[test]
    fn euler_characteristic_matches_cohomology_sum() {
        // dims 2 at (0,0), 1 at (0,1), rank-1 differential
        let mut c = BigradedComplex::new("chi");
        c.set_dim(bd(0, 0), 2);
        c.set_dim(bd(0, 1), 1);
        c.set_diff(
            bd(0, 0),
            SparseMatrix::from_triples(1, 2, vec![(0, 0, Scalar::one())]).unwrap(),
        )
        .unwrap();
        assert_eq!(c.euler_characteristic(0), 1);
        let from_cohomology: i64 = (0..2)
            .map(|q| {
                let d = c.cohomology(bd(0, q)).unwrap().dim as i64;
                if q % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .sum();
        assert_eq!(from_cohomology, 1);
        assert_eq!(square_complex().euler_characteristic(0), 0);
        assert_eq!(acyclic_interval().euler_characteristic(0), 0);
    }

    #[test]
    fn direct_sum_adds_dimensions_and_stays_valid() {
        let s = square_complex().direct_sum(&acyclic_interval(), "sum");
        assert!(s.validate().is_valid());
        assert_eq!(s.dim_at(bd(0, 0)), 2);
        assert_eq!(s.cohomology(bd(0, 0)).unwrap().dim, 1);
        assert_eq!(s.cohomology(bd(0, 1)).unwrap().dim, 1);
    }
}
