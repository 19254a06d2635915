//! Poster and soundtrack decoding.

use std::path::Path;

use moodpick_core::audio::AudioClip;
use moodpick_core::color::{PosterImage, Rgb};

use crate::{Error, Result};

/// Decodes a PNG or JPEG poster to 8-bit RGB, compositing any alpha over
/// white.
pub fn load_poster(path: &Path) -> Result<PosterImage> {
    let img = image::open(path).map_err(|source| Error::Image {
        path: path.to_owned(),
        source,
    })?;
    let rgba = img.to_rgba8();
    let (width, height) = rgba.dimensions();
    let pixels = rgba
        .pixels()
        .map(|p| {
            let [r, g, b, a] = p.0;
            Rgb([over_white(r, a), over_white(g, a), over_white(b, a)])
        })
        .collect();
    PosterImage::new(width, height, pixels).map_err(|e| Error::Media {
        path: path.to_owned(),
        detail: e.to_string(),
    })
}

fn over_white(c: u8, alpha: u8) -> u8 {
    let (c, a) = (u32::from(c), u32::from(alpha));
    ((c * a + 255 * (255 - a) + 127) / 255) as u8
}

/// Reads a 16-bit PCM WAV file, averaging stereo down to mono.
pub fn load_wav(path: &Path) -> Result<AudioClip> {
    let wav_err = |source| Error::Wav {
        path: path.to_owned(),
        source,
    };
    let reader = hound::WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::Media {
            path: path.to_owned(),
            detail: format!(
                "unsupported WAV encoding {:?} {}-bit, expected 16-bit PCM",
                spec.sample_format, spec.bits_per_sample
            ),
        });
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| f32::from(v) / 32768.0))
        .collect::<std::result::Result<Vec<f32>, _>>()
        .map_err(wav_err)?;
    AudioClip::from_interleaved(spec.sample_rate, spec.channels, &samples).map_err(|e| {
        Error::Media {
            path: path.to_owned(),
            detail: e.to_string(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_composites_over_white() {
        assert_eq!(over_white(0, 0), 255);
        assert_eq!(over_white(0, 255), 0);
        assert_eq!(over_white(200, 255), 200);
        assert_eq!(over_white(0, 128), 127);
    }

    #[test]
    fn decodes_png_and_wav() {
        let dir = tempfile::tempdir().unwrap();
        let png = dir.path().join("p.png");
        let mut img = image::RgbaImage::new(4, 2);
        for (x, _, px) in img.enumerate_pixels_mut() {
            *px = if x < 2 {
                image::Rgba([255, 0, 0, 255])
            } else {
                image::Rgba([0, 0, 0, 0])
            };
        }
        img.save(&png).unwrap();
        let poster = load_poster(&png).unwrap();
        assert_eq!((poster.width(), poster.height()), (4, 2));
        assert_eq!(poster.pixels()[0], Rgb([255, 0, 0]));
        assert_eq!(poster.pixels()[3], Rgb([255, 255, 255]));

        let wav = dir.path().join("a.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&wav, spec).unwrap();
        for _ in 0..100 {
            w.write_sample(16384i16).unwrap();
            w.write_sample(0i16).unwrap();
        }
        w.finalize().unwrap();
        let clip = load_wav(&wav).unwrap();
        assert_eq!(clip.frames(), 100);
        assert_eq!(clip.samples()[0], 0.25);
    }

    #[test]
    fn missing_files_error() {
        assert!(load_poster(Path::new("/nonexistent/poster.png")).is_err());
        assert!(load_wav(Path::new("/nonexistent/a.wav")).is_err());
    }
}
