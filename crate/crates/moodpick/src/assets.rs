//! Lexicon, palette and color-emotion knowledge base: the built-in defaults
//! and loaders for replacement files.

use std::collections::BTreeMap;
use std::path::Path;

use moodpick_core::color::{ColorEmotionKb, FuzzyColorTerm, Palette, DEFAULT_DOMINANCE_TAU};
use moodpick_core::text::EmotionLexicon;

use crate::files::{read_json, read_text};
use crate::{Error, Result};

pub const DEFAULT_LEXICON: &str = include_str!("../data/lexicon.tsv");
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");
pub const DEFAULT_PALETTE: &str = include_str!("../data/palette.json");
pub const DEFAULT_KB: &str = include_str!("../data/color_emotion_kb.json");

/// Everything the channel scorers need besides the movie itself.
#[derive(Debug, Clone)]
pub struct Resources {
    pub lexicon: EmotionLexicon,
    pub palette: Palette,
    pub kb: ColorEmotionKb,
    pub dominance_tau: f64,
}

impl Resources {
    pub fn builtin() -> Self {
        let lexicon = EmotionLexicon::parse(DEFAULT_LEXICON, DEFAULT_STOPWORDS)
            .expect("built-in lexicon is valid");
        let palette = parse_palette(DEFAULT_PALETTE).expect("built-in palette is valid");
        let kb = parse_kb(DEFAULT_KB, &palette).expect("built-in knowledge base is valid");
        Resources {
            lexicon,
            palette,
            kb,
            dominance_tau: DEFAULT_DOMINANCE_TAU,
        }
    }

    /// Built-in defaults with any of the given files swapped in.
    pub fn load(
        lexicon: Option<&Path>,
        stopwords: Option<&Path>,
        palette: Option<&Path>,
        kb: Option<&Path>,
    ) -> Result<Self> {
        let mut res = Self::builtin();
        if lexicon.is_some() || stopwords.is_some() {
            let lex = match lexicon {
                Some(p) => read_text(p)?,
                None => DEFAULT_LEXICON.to_owned(),
            };
            let stop = match stopwords {
                Some(p) => read_text(p)?,
                None => DEFAULT_STOPWORDS.to_owned(),
            };
            res.lexicon = EmotionLexicon::parse(&lex, &stop)?;
        }
        if let Some(p) = palette {
            let terms: Vec<FuzzyColorTerm> = read_json(p)?;
            res.palette = Palette::new(terms)?;
        }
        if palette.is_some() || kb.is_some() {
            let map: BTreeMap<String, Vec<String>> = match kb {
                Some(p) => read_json(p)?,
                None => serde_json::from_str(DEFAULT_KB).expect("built-in kb parses"),
            };
            res.kb = ColorEmotionKb::from_map(&map, &res.palette)?;
        }
        Ok(res)
    }
}

impl Default for Resources {
    fn default() -> Self {
        Self::builtin()
    }
}

pub fn parse_palette(json: &str) -> Result<Palette> {
    let terms: Vec<FuzzyColorTerm> = serde_json::from_str(json).map_err(|source| Error::Json {
        path: "<palette>".into(),
        source,
    })?;
    Ok(Palette::new(terms)?)
}

pub fn parse_kb(json: &str, palette: &Palette) -> Result<ColorEmotionKb> {
    let map: BTreeMap<String, Vec<String>> =
        serde_json::from_str(json).map_err(|source| Error::Json {
            path: "<knowledge base>".into(),
            source,
        })?;
    Ok(ColorEmotionKb::from_map(&map, palette)?)
}
