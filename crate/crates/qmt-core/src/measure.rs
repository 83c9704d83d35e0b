//! Histories theories: a sample space, a Hermitian decoherence matrix given
//! on singleton pairs and extended bilinearly, and the induced quantum
//! measure mu(A) = D(A,A).
//!
//! Construction validates every axiom up front — Hermiticity, unit total
//! measure, and nonnegativity of mu over the whole event algebra — and caches
//! mu for all 2^n events, so everything downstream runs off exact table
//! lookups.

use crate::error::{Error, Result};
use crate::scalar::{Mode, Real, Scalar, DEFAULT_TOLERANCE};
use crate::space::{all_events, Event, SampleSpace};

/// A cached nonnegative measure value.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureValue(Real);

impl MeasureValue {
    pub fn value(&self) -> &Real {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl std::fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The decoherence functional on singleton pairs: entry (a,b) is D({a},{b}).
/// D extends to event pairs bilinearly.
#[derive(Clone, Debug)]
pub struct DecoherenceMatrix {
    entries: Vec<Scalar>, // row-major n x n
    n: usize,
    mode: Mode,
}

impl DecoherenceMatrix {
    /// Accepts a square matrix of uniform-mode scalars. The Hermitian, unit
    /// total, and positivity axioms are validated when a theory is built,
    /// where the comparison tolerance is known.
    pub fn new(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        let entries: Vec<Scalar> = rows.into_iter().flatten().collect();
        let mode = entries.first().map(Scalar::mode).unwrap_or(Mode::Exact);
        if entries.iter().any(|s| s.mode() != mode) {
            return Err(Error::MixedModes);
        }
        Ok(DecoherenceMatrix { entries, n, mode })
    }

    /// Rank-one matrix from an amplitude vector: entry (a,b) = v_a * conj(v_b).
    pub fn from_amplitudes(amps: &[Scalar]) -> Result<Self> {
        let n = amps.len();
        let mode = amps.first().map(Scalar::mode).unwrap_or(Mode::Exact);
        if amps.iter().any(|s| s.mode() != mode) {
            return Err(Error::MixedModes);
        }
        let mut rows = Vec::with_capacity(n);
        for a in amps {
            rows.push(amps.iter().map(|b| a.mul(&b.conj())).collect());
        }
        DecoherenceMatrix::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn entry(&self, a: usize, b: usize) -> &Scalar {
        &self.entries[a * self.n + b]
    }

    fn check_hermitian(&self, tol: f64) -> Result<()> {
        for a in 0..self.n {
            for b in a..self.n {
                if !self.entry(a, b).eq_within(&self.entry(b, a).conj(), tol) {
                    return Err(Error::NonHermitian { row: a, col: b });
                }
            }
        }
        Ok(())
    }
}

/// A finite histories theory with its measure cached over the full event
/// algebra. Immutable after construction; all queries are pure.
#[derive(Clone, Debug)]
pub struct HistoriesTheory {
    space: SampleSpace,
    matrix: DecoherenceMatrix,
    tol: f64,
    mu: Vec<Real>,        // indexed by event mask
    null_masks: Vec<u32>, // masks with mu = 0, ascending
}

impl HistoriesTheory {
    pub fn new(space: SampleSpace, matrix: DecoherenceMatrix) -> Result<Self> {
        Self::with_tolerance(space, matrix, DEFAULT_TOLERANCE)
    }

    /// Build a theory with an explicit float-mode comparison tolerance.
    /// The tolerance is ignored in exact mode.
    pub fn with_tolerance(space: SampleSpace, matrix: DecoherenceMatrix, tol: f64) -> Result<Self> {
        let n = space.len();
        if matrix.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                rows: matrix.dim(),
                cols: matrix.dim(),
            });
        }
        let tol = if matrix.mode() == Mode::Exact {
            0.0
        } else {
            tol
        };
        matrix.check_hermitian(tol)?;

        let mu = compute_mu_table(&matrix);
        let full = Event::full(n).mask() as usize;
        if !mu[full].eq_within(&Real::one(matrix.mode()), tol) {
            return Err(Error::NotUnitTotal {
                total: mu[full].to_string(),
            });
        }
        for e in all_events(n) {
            if mu[e.mask() as usize].is_negative_within(tol) {
                return Err(Error::NegativeMeasure {
                    event: space.render_event(e),
                    value: mu[e.mask() as usize].to_string(),
                });
            }
        }
        let null_masks = (0..(1u64 << n) as u32)
            .filter(|&m| mu[m as usize].is_zero_within(tol))
            .collect();
        Ok(HistoriesTheory {
            space,
            matrix,
            tol,
            mu,
            null_masks,
        })
    }

    /// Build the rank-one theory with matrix entries v_a * conj(v_b); the
    /// amplitude sum must satisfy |sum v_i|^2 = 1.
    pub fn from_amplitudes<I, S>(labels: I, amps: Vec<Scalar>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::from_amplitudes_with(labels, amps, crate::space::DEFAULT_CAP, DEFAULT_TOLERANCE)
    }

    pub fn from_amplitudes_with<I, S>(
        labels: I,
        amps: Vec<Scalar>,
        cap: usize,
        tol: f64,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let space = SampleSpace::with_cap(labels, cap)?;
        if amps.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                rows: amps.len(),
                cols: amps.len(),
            });
        }
        let mode = amps[0].mode();
        let eps = if mode == Mode::Exact { 0.0 } else { tol };
        let mut sum = Scalar::zero(mode);
        for a in &amps {
            if a.mode() != mode {
                return Err(Error::MixedModes);
            }
            sum = sum.add(a);
        }
        let norm = sum.norm_sq();
        if !norm.eq_within(&Real::one(mode), eps) {
            return Err(Error::NotNormalized {
                norm: norm.to_string(),
            });
        }
        let matrix = DecoherenceMatrix::from_amplitudes(&amps)?;
        Self::with_tolerance(space, matrix, tol)
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DecoherenceMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn mode(&self) -> Mode {
        self.matrix.mode()
    }

    /// The comparison tolerance in force (0 in exact mode).
    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn check_event(&self, a: Event) -> Result<()> {
        if a.width() != self.n() {
            return Err(Error::ForeignEvent {
                event: format!("{a:?}"),
            });
        }
        Ok(())
    }

    /// The quantum measure of an event, from the cache.
    pub fn mu(&self, a: Event) -> Result<MeasureValue> {
        self.check_event(a)?;
        Ok(MeasureValue(self.mu[a.mask() as usize].clone()))
    }

    pub(crate) fn mu_raw(&self, mask: u32) -> &Real {
        &self.mu[mask as usize]
    }

    pub fn is_null(&self, a: Event) -> Result<bool> {
        self.check_event(a)?;
        Ok(self.is_null_mask(a.mask()))
    }

    pub(crate) fn is_null_mask(&self, mask: u32) -> bool {
        self.mu[mask as usize].is_zero_within(self.tol)
    }

    /// All events of measure zero, in canonical order. Always contains the
    /// empty event.
    pub fn null_events(&self) -> Vec<Event> {
        self.null_masks
            .iter()
            .map(|&m| Event::from_mask(m, self.n()))
            .collect()
    }

    pub(crate) fn null_masks(&self) -> &[u32] {
        &self.null_masks
    }

    /// The bilinear extension D(A,B): the sum of matrix entries over pairs
    /// drawn from A and B.
    pub fn d_of(&self, a: Event, b: Event) -> Result<Scalar> {
        self.check_event(a)?;
        self.check_event(b)?;
        let mut acc = Scalar::zero(self.mode());
        for i in a.members() {
            for j in b.members() {
                acc = acc.add(self.matrix.entry(i, j));
            }
        }
        Ok(acc)
    }

    /// The additive interference term I(A,B) = mu(A|B) - mu(A) - mu(B) for
    /// disjoint A, B; zero exactly when the pair is additive.
    pub fn interference(&self, a: Event, b: Event) -> Result<Real> {
        self.check_event(a)?;
        self.check_event(b)?;
        debug_assert!(a.is_disjoint_from(b));
        let join = self.mu_raw(a.mask() | b.mask());
        Ok(join.sub(self.mu_raw(a.mask())).sub(self.mu_raw(b.mask())))
    }

    /// Kolmogorov sum rule over the full event algebra: mu(A|B) = mu(A)+mu(B)
    /// for every disjoint pair.
    pub fn kolmogorov_holds(&self) -> bool {
        let n = self.n();
        for a in all_events(n) {
            for b in a.complement().subsets() {
                if !self
                    .interference(a, b)
                    .expect("events from own space")
                    .is_zero_within(self.tol)
                {
                    return false;
                }
            }
        }
        true
    }

    /// Kolmogorov sum rule restricted to a Boolean sublattice of the event
    /// algebra. The set must contain the empty and full events and be closed
    /// under complement and pairwise union.
    pub fn kolmogorov_holds_on(&self, algebra: &[Event]) -> Result<bool> {
        for e in algebra {
            self.check_event(*e)?;
        }
        let member = |e: Event| algebra.contains(&e);
        if !member(self.space.empty_event()) || !member(self.space.full_event()) {
            return Err(Error::NotASublattice {
                reason: "missing empty or full event".into(),
            });
        }
        for a in algebra {
            if !member(a.complement()) {
                return Err(Error::NotASublattice {
                    reason: format!("complement of {} missing", self.space.render_event(*a)),
                });
            }
            for b in algebra {
                if !member(a.union(*b)) {
                    return Err(Error::NotASublattice {
                        reason: format!(
                            "union of {} and {} missing",
                            self.space.render_event(*a),
                            self.space.render_event(*b)
                        ),
                    });
                }
            }
        }
        for a in algebra {
            for b in algebra {
                if a.is_disjoint_from(*b) && !self.interference(*a, *b)?.is_zero_within(self.tol) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// All pairwise-disjoint nonempty triples violating the quantum sum rule.
    /// Empty for every theory built from a decoherence matrix; the entry
    /// point exists so perturbed tables can be diagnosed.
    pub fn quantum_sum_rule_violations(&self) -> Vec<(Event, Event, Event)> {
        table_sum_rule_violations(self.n(), &self.mu, self.tol)
    }

    /// Positive semidefiniteness of the matrix (strong positivity). The
    /// construction axioms only require the diagonal condition mu >= 0, so a
    /// failure here is a diagnostic, not an error.
    pub fn is_strongly_positive(&self) -> bool {
        // Hermitian M is PSD iff repeated Schur complements keep nonnegative
        // pivots, with zero pivots forcing a zero row.
        let n = self.n();
        let mut m: Vec<Vec<Scalar>> = (0..n)
            .map(|a| (0..n).map(|b| self.matrix.entry(a, b).clone()).collect())
            .collect();
        let tol = self.tol;
        let mut live: Vec<usize> = (0..n).collect();
        while let Some(&p) = live.first() {
            let pivot = m[p][p].clone();
            if pivot.re().is_negative_within(tol) {
                return false;
            }
            if pivot.re().is_zero_within(tol) {
                if live.iter().any(|&j| !m[p][j].is_zero_within(tol)) {
                    return false;
                }
                live.remove(0);
                continue;
            }
            for &i in &live[1..] {
                for &j in &live[1..] {
                    let correction = m[i][p].mul(&m[p][j]).div(&pivot).expect("pivot is nonzero");
                    m[i][j] = m[i][j].sub(&correction);
                }
            }
            live.remove(0);
        }
        true
    }
}

/// The measure table for all 2^n events, built incrementally: adding history
/// x to A contributes M[x][x] plus the cross terms 2 Re M[a][x] for a in A.
fn compute_mu_table(matrix: &DecoherenceMatrix) -> Vec<Real> {
    let n = matrix.dim();
    let mode = matrix.mode();
    let two = Real::from_integer(2, mode);
    // cross[a][x] = 2 Re M[a][x]; diag[x] = Re M[x][x]
    let cross: Vec<Vec<Real>> = (0..n)
        .map(|a| (0..n).map(|x| two.mul(matrix.entry(a, x).re())).collect())
        .collect();
    let mut table = vec![Real::zero(mode); 1 << n];
    for mask in 1u32..(1u32 << n) {
        let x = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut v = table[rest as usize].add(matrix.entry(x, x).re());
        let mut r = rest;
        while r != 0 {
            let a = r.trailing_zeros() as usize;
            v = v.add(&cross[a][x]);
            r &= r - 1;
        }
        table[mask as usize] = v;
    }
    table
}

/// Quantum sum rule over a raw measure table: for all pairwise-disjoint
/// nonempty triples, mu(A|B|C) = mu(A|B)+mu(B|C)+mu(C|A)-mu(A)-mu(B)-mu(C).
/// Returns the violating triples in canonical order.
pub fn table_sum_rule_violations(n: usize, table: &[Real], tol: f64) -> Vec<(Event, Event, Event)> {
    assert_eq!(table.len(), 1 << n);
    let mut out = Vec::new();
    for a in all_events(n).filter(|a| !a.is_empty()) {
        for b in a.complement().subsets().filter(|b| !b.is_empty()) {
            if b.mask() < a.mask() {
                continue;
            }
            let ab = a.mask() | b.mask();
            let rest = Event::from_mask(!ab & Event::full(n).mask(), n);
            for c in rest.subsets().filter(|c| !c.is_empty()) {
                if c.mask() < b.mask() {
                    continue;
                }
                let lhs = &table[(ab | c.mask()) as usize];
                let rhs = table[ab as usize]
                    .add(&table[(b.mask() | c.mask()) as usize])
                    .add(&table[(c.mask() | a.mask()) as usize])
                    .sub(&table[a.mask() as usize])
                    .sub(&table[b.mask() as usize])
                    .sub(&table[c.mask() as usize]);
                if !lhs.eq_within(&rhs, tol) {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;

    fn rat(s: &str) -> Scalar {
        Scalar::exact(parse_rational(s).unwrap(), parse_rational("0").unwrap())
    }

    pub fn coin() -> HistoriesTheory {
        let rows = (0..4)
            .map(|a| {
                (0..4)
                    .map(|b| if a == b { rat("1/4") } else { rat("0") })
                    .collect()
            })
            .collect();
        HistoriesTheory::new(
            SampleSpace::new(["hh", "ht", "th", "tt"]).unwrap(),
            DecoherenceMatrix::new(rows).unwrap(),
        )
        .unwrap()
    }

    pub fn three_path() -> HistoriesTheory {
        HistoriesTheory::from_amplitudes(
            ["a", "b", "c"],
            vec![
                Scalar::exact_int(1, 0),
                Scalar::exact_int(1, 0),
                Scalar::exact_int(-1, 0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn coin_theory_is_uniform() {
        let t = coin();
        let s = t.space();
        let hh_ht = s.event_from_labels(["hh", "ht"]).unwrap();
        assert_eq!(
            t.mu(hh_ht).unwrap().value(),
            &Real::Exact(parse_rational("1/2").unwrap())
        );
        assert_eq!(
            t.mu(s.empty_event()).unwrap().value(),
            &Real::zero(Mode::Exact)
        );
        assert!(t.kolmogorov_holds());
        assert_eq!(t.null_events(), vec![s.empty_event()]);
        assert!(t.is_strongly_positive());
    }

    #[test]
    fn single_history_theory() {
        let t = HistoriesTheory::new(
            SampleSpace::new(["a"]).unwrap(),
            DecoherenceMatrix::new(vec![vec![rat("1")]]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            t.mu(Event::full(1)).unwrap().value(),
            &Real::one(Mode::Exact)
        );
        assert_eq!(t.null_events(), vec![Event::empty(1)]);
        assert!(t.quantum_sum_rule_violations().is_empty());
    }

    #[test]
    fn three_path_measure_matches_amplitude_oracle() {
        let t = three_path();
        // oracle: mu(A) = |sum of amplitudes in A|^2, amplitudes (1,1,-1)
        let v = [1i64, 1, -1];
        for e in all_events(3) {
            let s: i64 = e.members().map(|i| v[i]).sum();
            let expect = Real::from_integer(s * s, Mode::Exact);
            assert_eq!(t.mu(e).unwrap().value(), &expect, "event {e:?}");
        }
        let s = t.space();
        let ab = s.event_from_labels(["a", "b"]).unwrap();
        assert_eq!(
            t.mu(ab).unwrap().value(),
            &Real::from_integer(4, Mode::Exact)
        );
        let nulls = t.null_events();
        assert_eq!(
            nulls,
            vec![
                s.empty_event(),
                s.event_from_labels(["a", "c"]).unwrap(),
                s.event_from_labels(["b", "c"]).unwrap(),
            ]
        );
        assert!(!t.kolmogorov_holds());
        // witness: mu({a,b}) = 4 but mu({a}) + mu({b}) = 2
        let a = s.event_from_labels(["a"]).unwrap();
        let b = s.event_from_labels(["b"]).unwrap();
        assert!(!t.interference(a, b).unwrap().is_zero_within(0.0));
        assert!(t.quantum_sum_rule_violations().is_empty());
        // rank-one matrices are positive semidefinite
        assert!(t.is_strongly_positive());
    }

    #[test]
    fn trivial_sublattice_is_additive() {
        let t = three_path();
        let s = t.space();
        let algebra = vec![s.empty_event(), s.full_event()];
        assert!(t.kolmogorov_holds_on(&algebra).unwrap());
        let broken = vec![s.empty_event(), s.event_from_labels(["a"]).unwrap()];
        assert!(matches!(
            t.kolmogorov_holds_on(&broken),
            Err(Error::NotASublattice { .. })
        ));
    }

    #[test]
    fn construction_rejects_bad_axioms() {
        // non-Hermitian
        let m = DecoherenceMatrix::new(vec![
            vec![rat("1/2"), rat("1/4")],
            vec![rat("0"), rat("1/2")],
        ])
        .unwrap();
        assert!(matches!(
            HistoriesTheory::new(SampleSpace::new(["a", "b"]).unwrap(), m),
            Err(Error::NonHermitian { row: 0, col: 1 })
        ));
        // total off
        let m =
            DecoherenceMatrix::new(vec![vec![rat("1/2"), rat("0")], vec![rat("0"), rat("1/4")]])
                .unwrap();
        assert!(matches!(
            HistoriesTheory::new(SampleSpace::new(["a", "b"]).unwrap(), m),
            Err(Error::NotUnitTotal { .. })
        ));
        // negative singleton measure, Hermitian and unit total
        let m = DecoherenceMatrix::new(vec![
            vec![rat("-1/8"), rat("3/8")],
            vec![rat("3/8"), rat("3/8")],
        ])
        .unwrap();
        assert!(matches!(
            HistoriesTheory::new(SampleSpace::new(["a", "b"]).unwrap(), m),
            Err(Error::NegativeMeasure { .. })
        ));
        // dimension mismatch
        let m = DecoherenceMatrix::new(vec![vec![rat("1")]]).unwrap();
        assert!(matches!(
            HistoriesTheory::new(SampleSpace::new(["a", "b"]).unwrap(), m),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn amplitude_normalization_is_enforced() {
        let ok = HistoriesTheory::from_amplitudes(["a"], vec![Scalar::exact_int(1, 0)]).unwrap();
        assert_eq!(ok.n(), 1);
        assert!(matches!(
            HistoriesTheory::from_amplitudes(
                ["a", "b"],
                vec![Scalar::exact_int(1, 0), Scalar::exact_int(1, 0)]
            ),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn float_mode_uses_tolerance() {
        let t = HistoriesTheory::from_amplitudes(
            ["a", "b", "c"],
            vec![
                Scalar::float(0.1 + 0.2, 0.0),
                Scalar::float(-0.3, 0.0),
                Scalar::float(1.0, 0.0),
            ],
        )
        .unwrap();
        let s = t.space();
        let ab = s.event_from_labels(["a", "b"]).unwrap();
        assert!(t.is_null(ab).unwrap());
        assert!(t
            .null_events()
            .contains(&s.event_from_labels(["a", "b"]).unwrap()));
        assert!(!t.is_null(s.full_event()).unwrap());
    }

    #[test]
    fn perturbed_table_violates_sum_rule() {
        let t = coin();
        let mut table: Vec<Real> = (0..16).map(|m| t.mu_raw(m).clone()).collect();
        let abc = 0b0111u32; // {hh,ht,th}
        table[abc as usize] = table[abc as usize].add(&Real::one(Mode::Exact));
        let violations = table_sum_rule_violations(4, &table, 0.0);
        assert!(!violations.is_empty());
        // every reported triple involves the perturbed union somewhere
        assert!(violations.iter().all(|(a, b, c)| {
            let u = a.mask() | b.mask() | c.mask();
            u == abc
                || (a.mask() | b.mask()) == abc
                || (b.mask() | c.mask()) == abc
                || (c.mask() | a.mask()) == abc
                || [a, b, c].iter().any(|e| e.mask() == abc)
        }));
    }

    #[test]
    fn foreign_event_is_rejected() {
        let t = coin();
        assert!(matches!(
            t.mu(Event::full(3)),
            Err(Error::ForeignEvent { .. })
        ));
    }
}
