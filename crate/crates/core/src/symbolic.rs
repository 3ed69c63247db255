//! SAX and eSAX symbolisation over a step-1 sliding window.
//!
//! Every window is Z-normalised on its own, reduced with piecewise aggregate
//! approximation and mapped onto equiprobable Gaussian cells. Symbols are
//! kept as ordinals (`a` = 0) and only rendered as letters for display.

use std::fmt;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::TimeSeries;
use crate::eda::z_normalize;
use crate::{Error, Result};

pub const DEFAULT_ALPHABET_SIZE: usize = 4;
pub const DEFAULT_WINDOW: usize = 52;
pub const DEFAULT_SEGMENTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if !(2..=26).contains(&size) {
            return Err(Error::InvalidAlphabet(size));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn symbols(&self) -> impl Iterator<Item = char> {
        (b'a'..b'a' + self.size as u8).map(char::from)
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self {
            size: DEFAULT_ALPHABET_SIZE,
        }
    }
}

/// Ascending cut points in z-score units, `alphabet size - 1` of them.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoints {
    cuts: Vec<f64>,
}

impl Breakpoints {
    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    /// Ordinal of the cell containing `v`; a value on a cut takes the upper cell.
    pub fn cell(&self, v: f64) -> u8 {
        self.cuts.partition_point(|c| *c <= v) as u8
    }
}

/// `cuts[i] = Phi^-1((i + 1) / size)`, mirrored so the cuts are exactly
/// symmetric about zero.
pub fn gaussian_breakpoints(alphabet_size: usize) -> Result<Breakpoints> {
    let a = Alphabet::new(alphabet_size)?;
    let n = a.size;
    let normal = Normal::standard();
    let mut cuts = vec![0.0; n - 1];
    for i in 0..(n - 1) / 2 {
        let c = normal.inverse_cdf((i + 1) as f64 / n as f64);
        cuts[i] = c;
        cuts[n - 2 - i] = -c;
    }
    Ok(Breakpoints { cuts })
}

/// Overlap, in units of `1 / segments` samples, between sample `i` and
/// segment `j` when `len` samples are split into `segments` equal pieces.
fn overlap(i: usize, j: usize, len: usize, segments: usize) -> usize {
    let (s_lo, s_hi) = (i * segments, (i + 1) * segments);
    let (g_lo, g_hi) = (j * len, (j + 1) * len);
    s_hi.min(g_hi).saturating_sub(s_lo.max(g_lo))
}

/// Sample index range touching segment `j`.
fn segment_span(j: usize, len: usize, segments: usize) -> std::ops::Range<usize> {
    let lo = j * len / segments;
    let hi = ((j + 1) * len).div_ceil(segments);
    lo..hi
}

/// Piecewise aggregate approximation. When `segments` does not divide the
/// length, boundary samples are shared between neighbouring segments in
/// proportion to their overlap, so each segment carries exactly
/// `len / segments` samples of mass.
pub fn paa(x: &[f64], segments: usize) -> Result<Vec<f64>> {
    let len = x.len();
    if segments == 0 || segments > len {
        return Err(Error::InvalidSegmentation { len, segments });
    }
    Ok((0..segments)
        .map(|j| {
            segment_span(j, len, segments)
                .map(|i| overlap(i, j, len, segments) as f64 * x[i])
                .sum::<f64>()
                / len as f64
        })
        .collect())
}

/// Maps each value to its cell ordinal.
pub fn symbolize(v: &[f64], b: &Breakpoints) -> Vec<u8> {
    v.iter().map(|x| b.cell(*x)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordKind {
    Sax,
    Esax,
}

impl WordKind {
    pub fn name(self) -> &'static str {
        match self {
            WordKind::Sax => "SAX",
            WordKind::Esax => "eSAX",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicWord {
    /// Cell ordinals, `a` = 0.
    pub symbols: Vec<u8>,
    pub kind: WordKind,
}

impl fmt::Display for SymbolicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", char::from(b'a' + s))?;
        }
        Ok(())
    }
}

fn check_window(len: usize, segments: usize) -> Result<()> {
    if segments == 0 || len < segments {
        return Err(Error::InvalidSegmentation { len, segments });
    }
    Ok(())
}

/// One SAX word: Z-normalise the window, PAA, then symbolise.
pub fn sax_word(window: &[f64], segments: usize, a: Alphabet) -> Result<SymbolicWord> {
    check_window(window.len(), segments)?;
    let b = gaussian_breakpoints(a.size())?;
    Ok(sax_word_with(window, segments, &b))
}

fn sax_word_with(window: &[f64], segments: usize, b: &Breakpoints) -> SymbolicWord {
    let z = z_normalize(window);
    let means = paa(&z, segments).expect("segments checked");
    SymbolicWord {
        symbols: symbolize(&means, b),
        kind: WordKind::Sax,
    }
}

/// One eSAX word: per segment, the min, mean and max of the Z-normalised
/// window are symbolised and emitted in time order.
///
/// The min and max sit at their first occurrence inside the segment; the
/// mean sits at the segment midpoint. Position ties resolve as min, mean,
/// max.
pub fn esax_word(window: &[f64], segments: usize, a: Alphabet) -> Result<SymbolicWord> {
    check_window(window.len(), segments)?;
    let b = gaussian_breakpoints(a.size())?;
    Ok(esax_word_with(window, segments, &b))
}

fn esax_word_with(window: &[f64], segments: usize, b: &Breakpoints) -> SymbolicWord {
    let z = z_normalize(window);
    let len = z.len();
    let means = paa(&z, segments).expect("segments checked");
    let mut symbols = Vec::with_capacity(3 * segments);
    for (j, mean) in means.iter().enumerate() {
        let span = segment_span(j, len, segments);
        let (mut min_at, mut max_at) = (span.start, span.start);
        for i in span {
            if z[i] < z[min_at] {
                min_at = i;
            }
            if z[i] > z[max_at] {
                max_at = i;
            }
        }
        let mid = (j as f64 + 0.5) * len as f64 / segments as f64 - 0.5;
        // (position, tie priority, value)
        let mut triple = [
            (min_at as f64, 0, z[min_at]),
            (mid, 1, *mean),
            (max_at as f64, 2, z[max_at]),
        ];
        triple.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
        symbols.extend(triple.iter().map(|t| b.cell(t.2)));
    }
    SymbolicWord {
        symbols,
        kind: WordKind::Esax,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordSequence {
    pub keyword: String,
    pub words: Vec<SymbolicWord>,
    pub window: usize,
    pub n_segments: usize,
    pub alphabet: Alphabet,
}

/// Words for every step-1 window of `values`.
pub fn sliding_words_values(
    values: &[f64],
    window: usize,
    segments: usize,
    a: Alphabet,
    kind: WordKind,
) -> Result<Vec<SymbolicWord>> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    if window > values.len() {
        return Err(Error::WindowTooLarge {
            window,
            len: values.len(),
        });
    }
    check_window(window, segments)?;
    let b = gaussian_breakpoints(a.size())?;
    Ok(values
        .windows(window)
        .map(|w| match kind {
            WordKind::Sax => sax_word_with(w, segments, &b),
            WordKind::Esax => esax_word_with(w, segments, &b),
        })
        .collect())
}

pub fn sliding_words(
    x: &TimeSeries,
    window: usize,
    segments: usize,
    a: Alphabet,
    kind: WordKind,
) -> Result<WordSequence> {
    Ok(WordSequence {
        keyword: x.keyword().to_string(),
        words: sliding_words_values(x.values(), window, segments, a, kind)?,
        window,
        n_segments: segments,
        alphabet: a,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicFeatureVector {
    pub keyword: String,
    pub values: Vec<f64>,
}

/// Concatenates the ordinals of every word in window order.
pub fn encode_features(ws: &WordSequence) -> Result<SymbolicFeatureVector> {
    if ws.words.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(SymbolicFeatureVector {
        keyword: ws.keyword.clone(),
        values: ws
            .words
            .iter()
            .flat_map(|w| w.symbols.iter().map(|s| f64::from(*s)))
            .collect(),
    })
}
