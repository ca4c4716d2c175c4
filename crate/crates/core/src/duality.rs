//! Dual (current-side) complexes and the comparison with the form side.
//!
//! For a complex supported in the square [0, n] x [0, n], the dual complex
//! puts the linear dual of the (n-p, n-q) space in bidegree (p, q) and
//! twists the transposed differential by `(-1)^(p+q+1)`. A pairing on a
//! complex (wedge followed by integration, recorded as one matrix per
//! bidegree) then induces a map from forms to currents; its chain-map
//! property is exactly the closed-integral form of Stokes' identity, and
//! `compare_forms_currents` upgrades it to a full ladder between the
//! relative sequence of a cover and its current-side counterpart.

use std::collections::BTreeMap;

use crate::bicomplex::{bd, Bidegree, BigradedComplex, ChainMap};
use crate::cover::{relative_complex, ses_of_pair, total_complex_full, CoverDiagram, Simplex};
use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;
use crate::sequence::{compare_les, LadderReport, LesLadder};

/// The dual of a complex inside the [0, n] square, remembering n.
#[derive(Clone, Debug)]
pub struct DualComplex {
    pub complex: BigradedComplex,
    pub n: i32,
}

impl DualComplex {
    /// Evaluate a functional of bidegree `at` on a form of the
    /// complementary bidegree: the coordinate dot product.
    pub fn eval(&self, at: Bidegree, functional: &[Scalar], form: &[Scalar]) -> Result<Scalar> {
        if functional.len() != self.complex.dim_at(at) {
            return Err(Error::ElementShape {
                at,
                got: functional.len(),
                want: self.complex.dim_at(at),
            });
        }
        if form.len() != functional.len() {
            return Err(Error::ElementShape {
                at: bd(self.n - at.p, self.n - at.q),
                got: form.len(),
                want: functional.len(),
            });
        }
        let mut acc = Scalar::zero();
        for (t, f) in functional.iter().zip(form) {
            acc += &(t * f);
        }
        Ok(acc)
    }
}

fn check_square(c: &BigradedComplex, n: i32) -> Result<()> {
    for at in c.support() {
        if at.p < 0 || at.q < 0 || at.p > n || at.q > n {
            return Err(Error::SupportOutsideSquare {
                name: c.name.clone(),
                n,
                at,
            });
        }
    }
    Ok(())
}

fn twist_sign(at: Bidegree) -> Scalar {
    if (at.p + at.q + 1).rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

/// Dual complex: dimension at (p, q) is the source dimension at
/// (n-p, n-q), differential the transpose of the source differential into
/// (n-p, n-q) scaled by `(-1)^(p+q+1)`.
pub fn dualize(c: &BigradedComplex, n: i32) -> Result<DualComplex> {
    check_square(c, n)?;
    let mut out = BigradedComplex::new(format!("dual({})", c.name));
    for at in c.support() {
        out.set_dim(bd(n - at.p, n - at.q), c.dim_at(at));
    }
    for &at in &out.support() {
        let mirror = bd(n - at.p, n - at.q - 1);
        let m = c.diff_at(mirror).transpose().scale(&twist_sign(at));
        out.set_diff(at, m)?;
    }
    out.validate().into_result(&out.name.clone())?;
    Ok(DualComplex { complex: out, n })
}

/// Bidegrees where the defining sign identity of the dual differential
/// holds: pairing the dual differential against a form equals
/// `(-1)^(p+q+1)` times pairing against the differential of the form.
/// Each entry is one bidegree of the dual and the outcome of comparing
/// both bilinear forms entry for entry.
pub fn dual_sign_witnesses(c: &BigradedComplex, n: i32) -> Result<Vec<(Bidegree, bool)>> {
    let dual = dualize(c, n)?;
    let mut out = Vec::new();
    for p in 0..=n {
        for q in 0..=n {
            let at = bd(p, q);
            // <d T, phi> as a matrix in (T, phi)
            let lhs = dual.complex.diff_at(at).transpose();
            let rhs = c.diff_at(bd(n - p, n - q - 1)).scale(&twist_sign(at));
            out.push((at, lhs == rhs));
        }
    }
    Ok(out)
}

/// The canonical identification of a complex with its double dual:
/// blockwise `(-1)^q` times the identity. Returned verified; the double
/// dual's differential is the negative of the original, which is exactly
/// what this sign absorbs.
pub fn double_dual_iso(c: &BigradedComplex, n: i32) -> Result<ChainMap> {
    let double = dualize(&dualize(c, n)?.complex, n)?;
    let mut iso = ChainMap::new(c.clone(), double.complex.clone(), bd(0, 0));
    for &at in &c.support() {
        let sign = if at.q.rem_euclid(2) == 0 {
            Scalar::one()
        } else {
            Scalar::from_int(-1)
        };
        iso.set_block(at, SparseMatrix::identity(c.dim_at(at)).scale(&sign))?;
    }
    iso.verify()?;
    Ok(iso)
}

/// Wedge-and-integrate data on one complex: `block_at(p, q)` has entry
/// (j, k) equal to the integral of the j-th (p, q) basis form wedged with
/// the k-th (n-p, n-q) basis form, and `unit` is the coordinates of the
/// constant function in degree (0, 0).
#[derive(Clone, Debug)]
pub struct PairingData {
    pub complex: BigradedComplex,
    pub n: i32,
    blocks: BTreeMap<Bidegree, SparseMatrix>,
    pub unit: Vec<Scalar>,
}

impl PairingData {
    pub fn new(complex: BigradedComplex, n: i32, unit: Vec<Scalar>) -> Result<Self> {
        check_square(&complex, n)?;
        if unit.len() != complex.dim_at(bd(0, 0)) {
            return Err(Error::ElementShape {
                at: bd(0, 0),
                got: unit.len(),
                want: complex.dim_at(bd(0, 0)),
            });
        }
        Ok(PairingData {
            complex,
            n,
            blocks: BTreeMap::new(),
            unit,
        })
    }

    pub fn set_block(&mut self, at: Bidegree, m: SparseMatrix) -> Result<()> {
        let want_rows = self.complex.dim_at(at);
        let want_cols = self.complex.dim_at(bd(self.n - at.p, self.n - at.q));
        if m.rows() != want_rows || m.cols() != want_cols {
            return Err(Error::BlockShape {
                at,
                context: format!(
                    "pairing block must be {}x{}, got {}x{}",
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
            SparseMatrix::new(
                self.complex.dim_at(at),
                self.complex.dim_at(bd(self.n - at.p, self.n - at.q)),
            )
        })
    }

    /// Integral of a wedge of two coordinate vectors in complementary
    /// bidegrees.
    pub fn integrate_wedge(
        &self,
        at: Bidegree,
        left: &[Scalar],
        right: &[Scalar],
    ) -> Result<Scalar> {
        let block = self.block_at(at);
        let moved = block.mul_vec(right).map_err(|_| Error::ElementShape {
            at: bd(self.n - at.p, self.n - at.q),
            got: right.len(),
            want: block.cols(),
        })?;
        if left.len() != moved.len() {
            return Err(Error::ElementShape {
                at,
                got: left.len(),
                want: moved.len(),
            });
        }
        let mut acc = Scalar::zero();
        for (a, b) in left.iter().zip(&moved) {
            acc += &(a * b);
        }
        Ok(acc)
    }

    /// Check the unit is closed and that the integral of every exact
    /// wedge vanishes: for each basis form, integrating against the
    /// differential must match the signed dual differential. The failing
    /// basis index is reported.
    pub fn verify(&self) -> Result<()> {
        self.complex
            .validate()
            .into_result(&self.complex.name.clone())?;
        let d_unit = self.complex.diff_at(bd(0, 0)).mul_vec(&self.unit)?;
        if d_unit.iter().any(|v| !v.is_zero()) {
            return Err(Error::StokesViolation {
                at: bd(0, 0),
                index: usize::MAX,
            });
        }
        let dual = dualize(&self.complex, self.n)?;
        for p in 0..=self.n {
            for q in 0..=self.n {
                let at = bd(p, q);
                // i(d phi) versus d_dual(i phi), column by column
                let lhs = self
                    .block_at(at.up_q())
                    .transpose()
                    .mul(&self.complex.diff_at(at))?;
                let rhs = dual
                    .complex
                    .diff_at(at)
                    .mul(&self.block_at(at).transpose())?;
                let diff = lhs.sub(&rhs)?;
                if !diff.is_zero() {
                    let index = diff.entries().map(|(_, col, _)| col).min().unwrap_or(0);
                    return Err(Error::StokesViolation { at, index });
                }
            }
        }
        Ok(())
    }
}

/// The map sending a form to the current "integrate against me": at
/// (p, q) the transpose of the pairing block, landing in the dual complex
/// at (p, q). Verified to be a chain map.
pub fn form_to_current(pd: &PairingData) -> Result<ChainMap> {
    pd.verify()?;
    let dual = dualize(&pd.complex, pd.n)?;
    let mut map = ChainMap::new(pd.complex.clone(), dual.complex.clone(), bd(0, 0));
    for &at in &pd.complex.support() {
        map.set_block(at, pd.block_at(at).transpose())?;
    }
    map.verify()?;
    Ok(map)
}

/// The current-side diagram of a cover: every piece dualized, with
/// restrictions given by the adjoints of the extension maps and
/// extensions by the adjoints of the restrictions. Requires the source
/// diagram to carry extension maps.
pub fn dual_diagram(d: &CoverDiagram, n: i32) -> Result<CoverDiagram> {
    d.check()?;
    if !d.has_extensions() {
        return Err(Error::MissingExtensions {
            name: d.name.clone(),
        });
    }
    let mut out = CoverDiagram::new(format!("dual({})", d.name), d.index_set.clone());
    let mut duals: BTreeMap<Simplex, BigradedComplex> = BTreeMap::new();
    for s in d.simplices() {
        let dualized = dualize(d.complex_at(s)?, n)?;
        let mut piece = dualized.complex;
        piece.name = format!("dual({})", d.complex_at(s)?.name);
        duals.insert(s.clone(), piece.clone());
        out.set_piece(s.clone(), piece);
    }
    let adjoint = |source_dual: &BigradedComplex,
                   target_dual: &BigradedComplex,
                   map: &ChainMap|
     -> Result<ChainMap> {
        let mut adj = ChainMap::new(source_dual.clone(), target_dual.clone(), bd(0, 0));
        for &at in &source_dual.support() {
            let mirror = bd(n - at.p, n - at.q);
            adj.set_block(at, map.block_at(mirror).transpose())?;
        }
        Ok(adj)
    };
    for s in d.simplices() {
        for (_, face) in s.faces() {
            let ext = d.extension(&face, s)?;
            let restriction = adjoint(&duals[&face], &duals[s], ext)?;
            out.set_restriction(face.clone(), s.clone(), restriction);
            let res = d.restriction(&face, s)?;
            let extension = adjoint(&duals[s], &duals[&face], res)?;
            out.set_extension(face.clone(), s.clone(), extension);
        }
    }
    out.check()?;
    Ok(out)
}

/// Relative complex on the current side: the relative complex of the
/// dual diagram.
pub fn relative_current_complex(
    d: &CoverDiagram,
    n: i32,
    omit_label: &str,
) -> Result<crate::cover::RelativeComplex> {
    relative_complex(&dual_diagram(d, n)?, omit_label)
}

/// Result of comparing the form-side and current-side relative sequences
/// of a cover: per bidegree the two relative cohomology dimensions and
/// whether the induced map between them is an isomorphism, plus the
/// per-column ladder reports.
#[derive(Clone, Debug)]
pub struct FormsCurrentsReport {
    pub n: i32,
    pub relative_pairs: Vec<(Bidegree, usize, usize, bool)>,
    pub ladders: Vec<LadderReport>,
}

impl FormsCurrentsReport {
    pub fn equivalence_holds(&self) -> bool {
        self.relative_pairs.iter().all(|&(_, _, _, iso)| iso)
            && self
                .ladders
                .iter()
                .all(|l| l.all_ok() && l.middles_are_isos())
    }
}

/// Check naturality of the pairings against restrictions and extensions:
/// restricting a form and then taking its current must agree with taking
/// the current first and restricting it.
fn check_pairing_squares(
    d: &CoverDiagram,
    pairings: &BTreeMap<Simplex, PairingData>,
    n: i32,
) -> Result<()> {
    for s in d.simplices() {
        for (_, face) in s.faces() {
            let r = d.restriction(&face, s)?;
            let e = d.extension(&face, s)?;
            let p_face = &pairings[&face];
            let p_simplex = &pairings[s];
            for p in 0..=n {
                for q in 0..=n {
                    let at = bd(p, q);
                    let lhs = p_simplex.block_at(at).transpose().mul(&r.block_at(at))?;
                    let rhs = e
                        .block_at(bd(n - p, n - q))
                        .transpose()
                        .mul(&p_face.block_at(at).transpose())?;
                    if lhs != rhs {
                        return Err(Error::NonCommutingPairingSquare {
                            face: face.key(),
                            simplex: s.key(),
                            at,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Full forms-versus-currents comparison for a two-set cover: verifies
/// every pairing, checks naturality squares, builds the ladder between
/// the pair sequence and its current-side dual, and reports relative
/// cohomology dimensions with the induced isomorphism verdicts.
pub fn compare_forms_currents(
    d: &CoverDiagram,
    pairings: &BTreeMap<Simplex, PairingData>,
    omit_label: &str,
) -> Result<FormsCurrentsReport> {
    d.check()?;
    let mut n = None;
    for s in d.simplices() {
        let pd = pairings.get(s).ok_or_else(|| Error::NoSuchPiece {
            name: d.name.clone(),
            label: format!("pairing for {s}"),
        })?;
        if pd.complex.dims() != d.complex_at(s)?.dims() {
            return Err(Error::shape(format!(
                "pairing for {s} does not match the piece complex"
            )));
        }
        pd.verify()?;
        match n {
            None => n = Some(pd.n),
            Some(seen) if seen != pd.n => {
                return Err(Error::shape("pairings disagree about the ambient degree n"))
            }
            _ => {}
        }
    }
    let n = n.ok_or_else(|| Error::shape("cover has no pieces"))?;
    check_pairing_squares(d, pairings, n)?;

    let dual = dual_diagram(d, n)?;
    let ses_forms = ses_of_pair(d, omit_label)?;
    let ses_currents = ses_of_pair(&dual, omit_label)?;
    let (omitted, kept, overlap) = d.two_set_split(omit_label)?;
    let rel_forms = relative_complex(d, omit_label)?;
    let rel_currents = relative_complex(&dual, omit_label)?;

    // relative ladder map: blockwise form-to-current on both components
    let mut sub_map = ChainMap::new(ses_forms.sub.clone(), ses_currents.sub.clone(), bd(0, 0));
    let i_kept = pairings[&kept].clone();
    let i_overlap = pairings[&overlap].clone();
    let mut support: Vec<Bidegree> = ses_forms.sub.support();
    support.extend(ses_currents.sub.support());
    support.sort();
    support.dedup();
    for &at in &support {
        let (f_kept, f_over) = rel_forms.block_dims(at);
        let (c_kept, c_over) = rel_currents.block_dims(at);
        let mut m = SparseMatrix::new(c_kept + c_over, f_kept + f_over);
        m.insert_block(0, 0, &i_kept.block_at(at).transpose());
        m.insert_block(c_kept, f_kept, &i_overlap.block_at(at.down_q()).transpose());
        sub_map.set_block(at, m)?;
    }

    // total ladder map: form-to-current slotwise
    let tot_forms = total_complex_full(d)?;
    let tot_currents = total_complex_full(&dual)?;
    let mut mid_map = ChainMap::new(ses_forms.mid.clone(), ses_currents.mid.clone(), bd(0, 0));
    let mut mid_support: Vec<Bidegree> = ses_forms.mid.support();
    mid_support.extend(ses_currents.mid.support());
    mid_support.sort();
    mid_support.dedup();
    for &at in &mid_support {
        let mut m = SparseMatrix::new(ses_currents.mid.dim_at(at), ses_forms.mid.dim_at(at));
        for slot in tot_forms.slots_at(at) {
            if let Some(tgt) = tot_currents.slot(at, &slot.simplex) {
                m.insert_block(
                    tgt.offset,
                    slot.offset,
                    &pairings[&slot.simplex].block_at(slot.inner).transpose(),
                );
            }
        }
        mid_map.set_block(at, m)?;
    }

    let mut quot_map = ChainMap::new(ses_forms.quot.clone(), ses_currents.quot.clone(), bd(0, 0));
    for &at in &ses_forms.quot.support() {
        quot_map.set_block(at, pairings[&omitted].block_at(at).transpose())?;
    }

    let ladder = LesLadder {
        sub_map: sub_map.clone(),
        mid_map,
        quot_map,
    };
    let mut ladders = Vec::new();
    for p in 0..=n {
        ladders.push(compare_les(&ses_forms, &ses_currents, &ladder, p)?);
    }
    let mut relative_pairs = Vec::new();
    for &at in &support {
        let h_form = ses_forms.sub.cohomology(at)?.dim;
        let h_current = ses_currents.sub.cohomology(at)?.dim;
        let iso = sub_map.is_iso_on_cohomology(at)?;
        relative_pairs.push((at, h_form, h_current, iso));
    }
    Ok(FormsCurrentsReport {
        n,
        relative_pairs,
        ladders,
    })
}
