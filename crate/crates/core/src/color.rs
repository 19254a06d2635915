//! Poster emotion scoring.
//!
//! Pixels are converted to HSL and assigned to the fuzzy color term with the
//! highest membership. Terms covering more than `dominance_tau` of the
//! pixels form the poster's color set `C`, and each emotion scores
//! `|C ∩ KB(e)| / |C ∪ KB(e)|` against its knowledge-base term set.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotion::{ChannelScore, Emotion, EmotionProfile};

pub const DEFAULT_DOMINANCE_TAU: f64 = 0.05;

/// Emotions a color-emotion knowledge base may carry beyond the canonical
/// five. They are accepted on load and dropped.
pub const IGNORED_KB_EMOTIONS: [&str; 5] = ["Love", "Shyness", "Gratitude", "Shame", "Trust"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ColorError {
    #[error("palette is empty")]
    EmptyPalette,
    #[error("duplicate palette term {0:?}")]
    DuplicateTerm(String),
    #[error("palette term {name:?}: {reason}")]
    InvalidTerm { name: String, reason: &'static str },
    #[error("palette leaves hue {hue}, saturation {saturation}, lightness {lightness} uncovered")]
    Uncovered {
        hue: f64,
        saturation: f64,
        lightness: f64,
    },
    #[error("palette gap at hue {hue}, saturation {saturation}, lightness {lightness}")]
    PaletteGap {
        hue: f64,
        saturation: f64,
        lightness: f64,
    },
    #[error("knowledge base refers to unknown term {term:?} under {emotion}")]
    UnknownTerm { emotion: String, term: String },
    #[error("knowledge base key {0:?} is not an emotion")]
    UnknownEmotion(String),
    #[error("knowledge base has no terms for {0}")]
    EmptyEmotion(Emotion),
    #[error("image must have positive dimensions and width*height pixels")]
    InvalidImage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub [u8; 3]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hsl {
    /// Degrees in `[0, 360)`.
    pub hue: f64,
    pub saturation: f64,
    pub lightness: f64,
}

/// Standard bi-hexcone RGB to HSL. Gray pixels get hue 0.
pub fn rgb_to_hsl(Rgb([r, g, b]): Rgb) -> Hsl {
    let r = f64::from(r) / 255.0;
    let g = f64::from(g) / 255.0;
    let b = f64::from(b) / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let lightness = (max + min) / 2.0;
    let chroma = max - min;
    if chroma == 0.0 {
        return Hsl {
            hue: 0.0,
            saturation: 0.0,
            lightness,
        };
    }
    let saturation = chroma / (1.0 - libm::fabs(2.0 * lightness - 1.0));
    let sector = if max == r {
        libm::fmod((g - b) / chroma + 6.0, 6.0)
    } else if max == g {
        (b - r) / chroma + 2.0
    } else {
        (r - g) / chroma + 4.0
    };
    let mut hue = sector * 60.0;
    if hue >= 360.0 {
        hue -= 360.0;
    }
    Hsl {
        hue,
        saturation: saturation.min(1.0),
        lightness,
    }
}

/// A named region of HSL space with a trapezoidal hue membership.
///
/// Hue corners may leave `[0, 360)` to express wrap-around, e.g. red as
/// `[-20, -10, 10, 20]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyColorTerm {
    pub name: String,
    #[serde(default)]
    pub hue: [f64; 4],
    pub sat: [f64; 2],
    pub light: [f64; 2],
    #[serde(default)]
    pub achromatic: bool,
}

impl FuzzyColorTerm {
    fn validate(&self) -> Result<(), ColorError> {
        let bad = |reason| {
            Err(ColorError::InvalidTerm {
                name: self.name.clone(),
                reason,
            })
        };
        if self.name.is_empty() {
            return bad("empty name");
        }
        for band in [self.sat, self.light] {
            if !(band.iter().all(|v| (0.0..=1.0).contains(v)) && band[0] <= band[1]) {
                return bad("bands must satisfy 0 <= lo <= hi <= 1");
            }
        }
        if !self.achromatic {
            let [a, b, c, d] = self.hue;
            if !(self.hue.iter().all(|v| v.is_finite()) && a <= b && b <= c && c <= d) {
                return bad("hue corners must satisfy a <= b <= c <= d");
            }
            if d - a > 360.0 || a < -360.0 || d > 720.0 {
                return bad("hue trapezoid must span at most one turn");
            }
        }
        Ok(())
    }

    fn in_bands(&self, hsl: &Hsl) -> bool {
        let [slo, shi] = self.sat;
        let [llo, lhi] = self.light;
        (slo..=shi).contains(&hsl.saturation) && (llo..=lhi).contains(&hsl.lightness)
    }

    fn hue_membership(&self, hue: f64) -> f64 {
        let [a, b, c, d] = self.hue;
        [-360.0, 0.0, 360.0]
            .into_iter()
            .map(|shift| {
                let x = hue + shift;
                if x < a || x > d {
                    0.0
                } else if x >= b && x <= c {
                    1.0
                } else if x < b {
                    (x - a) / (b - a)
                } else {
                    (d - x) / (d - c)
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn membership(&self, hsl: &Hsl) -> f64 {
        if !self.in_bands(hsl) {
            0.0
        } else if self.achromatic {
            1.0
        } else {
            self.hue_membership(hsl.hue)
        }
    }
}

/// Ordered list of fuzzy color terms. Order matters: it breaks membership
/// ties, earliest term first.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    terms: Vec<FuzzyColorTerm>,
}

impl Palette {
    /// Validates the terms and checks that every point of a 36×5×5 HSL grid
    /// has a term with positive membership.
    pub fn new(terms: Vec<FuzzyColorTerm>) -> Result<Self, ColorError> {
        let palette = Self::partial(terms)?;
        for h in 0..36 {
            for s in 0..5 {
                for l in 0..5 {
                    let hsl = Hsl {
                        hue: f64::from(h) * 10.0,
                        saturation: f64::from(s) / 4.0,
                        lightness: f64::from(l) / 4.0,
                    };
                    if palette.best_match(&hsl).is_none() {
                        return Err(ColorError::Uncovered {
                            hue: hsl.hue,
                            saturation: hsl.saturation,
                            lightness: hsl.lightness,
                        });
                    }
                }
            }
        }
        Ok(palette)
    }

    /// Validates the terms but not coverage.
    pub fn partial(terms: Vec<FuzzyColorTerm>) -> Result<Self, ColorError> {
        if terms.is_empty() {
            return Err(ColorError::EmptyPalette);
        }
        let mut seen = BTreeSet::new();
        for term in &terms {
            term.validate()?;
            if !seen.insert(term.name.as_str()) {
                return Err(ColorError::DuplicateTerm(term.name.clone()));
            }
        }
        Ok(Palette { terms })
    }

    pub fn terms(&self) -> &[FuzzyColorTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.terms.iter().any(|t| t.name == name)
    }

    fn best_match(&self, hsl: &Hsl) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, term) in self.terms.iter().enumerate() {
            let m = term.membership(hsl);
            if m > 0.0 && best.is_none_or(|(_, b)| m > b) {
                best = Some((i, m));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Index of the term with maximum membership.
    pub fn classify(&self, hsl: &Hsl) -> Result<usize, ColorError> {
        self.best_match(hsl).ok_or(ColorError::PaletteGap {
            hue: hsl.hue,
            saturation: hsl.saturation,
            lightness: hsl.lightness,
        })
    }
}

pub fn classify_pixel<'p>(hsl: &Hsl, palette: &'p Palette) -> Result<&'p str, ColorError> {
    palette
        .classify(hsl)
        .map(|i| palette.terms[i].name.as_str())
}

/// Decoded poster raster, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PosterImage {
    width: u32,
    height: u32,
    pixels: Vec<Rgb>,
}

impl PosterImage {
    pub fn new(width: u32, height: u32, pixels: Vec<Rgb>) -> Result<Self, ColorError> {
        if width == 0 || height == 0 || pixels.len() as u64 != u64::from(width) * u64::from(height)
        {
            return Err(ColorError::InvalidImage);
        }
        Ok(PosterImage {
            width,
            height,
            pixels,
        })
    }

    pub fn uniform(width: u32, height: u32, color: Rgb) -> Result<Self, ColorError> {
        Self::new(width, height, vec![color; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }
}

/// Pixel count per palette term, indexed like `palette.terms()`.
pub fn term_histogram(img: &PosterImage, palette: &Palette) -> Result<Vec<usize>, ColorError> {
    let mut counts = vec![0usize; palette.len()];
    for &px in &img.pixels {
        counts[palette.classify(&rgb_to_hsl(px))?] += 1;
    }
    Ok(counts)
}

/// Terms whose share of the poster's pixels exceeds `dominance_tau`.
pub fn image_color_set(
    img: &PosterImage,
    palette: &Palette,
    dominance_tau: f64,
) -> Result<BTreeSet<String>, ColorError> {
    let counts = term_histogram(img, palette)?;
    let total = img.pixels.len() as f64;
    Ok(counts
        .iter()
        .zip(palette.terms())
        .filter(|(&c, _)| c as f64 / total > dominance_tau)
        .map(|(_, t)| t.name.clone())
        .collect())
}

/// Term sets per canonical emotion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorEmotionKb {
    terms: [BTreeSet<String>; 5],
}

impl ColorEmotionKb {
    /// Builds the knowledge base from an emotion-name → term-names map,
    /// dropping the extra emotions in [`IGNORED_KB_EMOTIONS`].
    pub fn from_map(
        map: &BTreeMap<String, Vec<String>>,
        palette: &Palette,
    ) -> Result<Self, ColorError> {
        let mut terms: [BTreeSet<String>; 5] = Default::default();
        for (key, names) in map {
            let emotion = match key.parse::<Emotion>() {
                Ok(e) => Some(e),
                Err(_) if IGNORED_KB_EMOTIONS.contains(&key.as_str()) => None,
                Err(_) => return Err(ColorError::UnknownEmotion(key.clone())),
            };
            for name in names {
                if !palette.contains(name) {
                    return Err(ColorError::UnknownTerm {
                        emotion: key.clone(),
                        term: name.clone(),
                    });
                }
            }
            if let Some(e) = emotion {
                terms[e.index()].extend(names.iter().cloned());
            }
        }
        for e in Emotion::ALL {
            if terms[e.index()].is_empty() {
                return Err(ColorError::EmptyEmotion(e));
            }
        }
        Ok(ColorEmotionKb { terms })
    }

    pub fn terms(&self, emotion: Emotion) -> &BTreeSet<String> {
        &self.terms[emotion.index()]
    }
}

/// Jaccard similarity of a color set against every emotion's term set.
pub fn score_color_set(colors: &BTreeSet<String>, kb: &ColorEmotionKb) -> ChannelScore {
    if colors.is_empty() {
        return ChannelScore::degenerate();
    }
    let mut scores = [0.0; 5];
    for e in Emotion::ALL {
        let kb_terms = kb.terms(e);
        let inter = colors.intersection(kb_terms).count();
        let union = colors.union(kb_terms).count();
        scores[e.index()] = inter as f64 / union as f64;
    }
    ChannelScore {
        profile: EmotionProfile::new(scores).expect("jaccard lies in [0, 1]"),
        degenerate: false,
    }
}

pub fn score_poster(
    img: &PosterImage,
    palette: &Palette,
    kb: &ColorEmotionKb,
    dominance_tau: f64,
) -> Result<ChannelScore, ColorError> {
    Ok(score_color_set(
        &image_color_set(img, palette, dominance_tau)?,
        kb,
    ))
}
