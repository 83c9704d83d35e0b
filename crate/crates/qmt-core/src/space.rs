//! Sample spaces, events, and the two-element truth lattice.
//!
//! Events are bit masks over the history indices; the canonical order on
//! events is ascending mask order (history `i` sits at bit `i`), which makes
//! every listing in the crate deterministic.

use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of histories; everything downstream of a theory
/// enumerates the full event algebra, so the cap keeps 2^n at desk scale.
pub const DEFAULT_CAP: usize = 10;

/// Absolute ceiling on the number of histories (events are u32 masks and the
/// measure cache holds 2^n entries).
pub const HARD_CAP: usize = 16;

/// The finite set of maximally detailed outcomes, named by distinct labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSpace {
    labels: Vec<String>,
}

impl SampleSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_cap(labels, DEFAULT_CAP)
    }

    pub fn with_cap<I, S>(labels: I, cap: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let cap = cap.min(HARD_CAP);
        if labels.is_empty() || labels.len() > cap {
            return Err(Error::CapExceeded {
                n: labels.len(),
                cap,
            });
        }
        for (i, a) in labels.iter().enumerate() {
            if a.is_empty() || labels[..i].contains(a) {
                return Err(Error::BadLabels);
            }
        }
        Ok(SampleSpace { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one history
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn empty_event(&self) -> Event {
        Event::empty(self.len())
    }

    pub fn full_event(&self) -> Event {
        Event::full(self.len())
    }

    pub fn singleton(&self, i: usize) -> Event {
        Event::singleton(i, self.len())
    }

    /// Build an event from history labels; unknown labels are rejected.
    pub fn event_from_labels<I, S>(&self, names: I) -> Result<Event>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut mask = 0u32;
        for name in names {
            let name = name.as_ref();
            let i = self.index_of(name).ok_or_else(|| Error::ForeignEvent {
                event: format!("{{{name}}}"),
            })?;
            mask |= 1 << i;
        }
        Ok(Event::from_mask(mask, self.len()))
    }

    /// Render an event with its history labels, e.g. `{a,c}`.
    pub fn render_event(&self, e: Event) -> String {
        let names: Vec<&str> = e.members().map(|i| self.label(i)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn event_labels(&self, e: Event) -> Vec<String> {
        e.members().map(|i| self.label(i).to_string()).collect()
    }

    /// All 2^n events in canonical (ascending mask) order.
    pub fn all_events(&self) -> impl Iterator<Item = Event> {
        all_events(self.len())
    }
}

/// A subset of the sample space, stored as a bit mask of width `n`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    width: u8,
    mask: u32,
}

impl Event {
    pub fn empty(n: usize) -> Self {
        Event::from_mask(0, n)
    }

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= HARD_CAP);
        Event::from_mask(((1u64 << n) - 1) as u32, n)
    }

    pub fn singleton(i: usize, n: usize) -> Self {
        debug_assert!(i < n);
        Event::from_mask(1 << i, n)
    }

    pub fn from_mask(mask: u32, n: usize) -> Self {
        debug_assert!(n <= HARD_CAP);
        debug_assert!(u64::from(mask) < (1u64 << n));
        Event {
            width: n as u8,
            mask,
        }
    }

    pub fn from_indices(indices: &[usize], n: usize) -> Result<Self> {
        let mut mask = 0u32;
        for &i in indices {
            if i >= n {
                return Err(Error::ForeignEvent {
                    event: format!("{{#{i}}}"),
                });
            }
            mask |= 1 << i;
        }
        Ok(Event::from_mask(mask, n))
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Width of the underlying sample space.
    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn same_space(&self, other: Event) -> bool {
        self.width == other.width
    }

    pub fn card(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        *self == Event::full(self.width())
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.width() && self.mask & (1 << i) != 0
    }

    pub fn members(&self) -> impl Iterator<Item = usize> {
        let mask = self.mask;
        (0..32u32)
            .filter(move |i| mask & (1 << i) != 0)
            .map(|i| i as usize)
    }

    pub fn union(&self, other: Event) -> Event {
        debug_assert!(self.same_space(other));
        Event::from_mask(self.mask | other.mask, self.width())
    }

    pub fn intersect(&self, other: Event) -> Event {
        debug_assert!(self.same_space(other));
        Event::from_mask(self.mask & other.mask, self.width())
    }

    pub fn minus(&self, other: Event) -> Event {
        debug_assert!(self.same_space(other));
        Event::from_mask(self.mask & !other.mask, self.width())
    }

    pub fn complement(&self) -> Event {
        Event::from_mask(!self.mask & Event::full(self.width()).mask, self.width())
    }

    pub fn is_subset_of(&self, other: Event) -> bool {
        debug_assert!(self.same_space(other));
        self.mask & !other.mask == 0
    }

    pub fn is_disjoint_from(&self, other: Event) -> bool {
        debug_assert!(self.same_space(other));
        self.mask & other.mask == 0
    }

    /// All subsets of this event in ascending mask order (includes the empty
    /// event and the event itself).
    pub fn subsets(&self) -> impl Iterator<Item = Event> {
        let mask = self.mask;
        let width = self.width();
        let mut cur = Some(0u32);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == mask {
                None
            } else {
                Some((c | !mask).wrapping_add(1) & mask)
            };
            Some(Event::from_mask(c, width))
        })
    }

    /// All supersets of this event in ascending mask order.
    pub fn supersets(&self) -> impl Iterator<Item = Event> {
        let base = *self;
        base.complement().subsets().map(move |s| base.union(s))
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<usize> = self.members().collect();
        write!(f, "Event{members:?}")
    }
}

/// All 2^n events over an n-history space in canonical order.
pub fn all_events(n: usize) -> impl Iterator<Item = Event> {
    debug_assert!(n <= HARD_CAP);
    (0..(1u64 << n)).map(move |m| Event::from_mask(m as u32, n))
}

/// The two-element Boolean lattice of truth values, ordered 0 < 1.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Z2 {
    Zero,
    One,
}

impl Z2 {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Z2::One
        } else {
            Z2::Zero
        }
    }

    pub fn as_bool(self) -> bool {
        self == Z2::One
    }

    pub fn and(self, other: Z2) -> Z2 {
        Z2::from_bool(self.as_bool() && other.as_bool())
    }

    pub fn or(self, other: Z2) -> Z2 {
        Z2::from_bool(self.as_bool() || other.as_bool())
    }

    pub fn not(self) -> Z2 {
        Z2::from_bool(!self.as_bool())
    }
}

impl fmt::Display for Z2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.as_bool() { 1 } else { 0 })
    }
}

/// The truth-value slot of a logical framework. Only Z2 is constructible; the
/// type keeps the slot explicit.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Z2Lattice;

impl Z2Lattice {
    pub fn elements(&self) -> [Z2; 2] {
        [Z2::Zero, Z2::One]
    }

    pub fn leq(&self, a: Z2, b: Z2) -> bool {
        a <= b
    }

    pub fn top(&self) -> Z2 {
        Z2::One
    }

    pub fn bottom(&self) -> Z2 {
        Z2::Zero
    }
}
