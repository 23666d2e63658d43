use core::fmt;

/// Half-open byte range `[start, end)` into a document's content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub const fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub const fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// True when `start <= end <= limit`.
    pub const fn fits(&self, limit: usize) -> bool {
        self.start <= self.end && self.end <= limit
    }

    /// `a < other.end && other.start < b`. An empty span strictly inside
    /// another counts as overlapping it.
    pub const fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// `other` lies inside `self` (boundaries included).
    pub const fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

/// Checks that a span list is non-empty, each span is well-formed, and the
/// spans are sorted by start without overlapping each other.
pub(crate) fn spans_well_ordered(spans: &[Span]) -> bool {
    !spans.is_empty()
        && spans.iter().all(|s| s.start <= s.end)
        && spans.windows(2).all(|w| w[0].end <= w[1].start)
}
