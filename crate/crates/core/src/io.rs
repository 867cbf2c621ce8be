//! RIMG container and 16-bit PGM export.
//!
//! A RIMG file is the 5-byte magic `RIMG\n`, a one-line JSON header, a line
//! feed, then `height * width` little-endian `f32` values in row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Image2D, Spacing};
use crate::metrics::Mask;
use crate::tomography::Sinogram;

pub const MAGIC: &[u8; 5] = b"RIMG\n";
pub const DTYPE: &str = "f32le";

/// Anything that can be stored in a RIMG file.
#[derive(Debug, Clone, PartialEq)]
pub enum Object {
    Image(Image2D),
    Sinogram(Sinogram),
    Mask(Mask),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Image(_) => "image",
            Object::Sinogram(_) => "sinogram",
            Object::Mask(_) => "mask",
        }
    }
}

impl From<Image2D> for Object {
    fn from(img: Image2D) -> Self {
        Object::Image(img)
    }
}

impl From<Sinogram> for Object {
    fn from(s: Sinogram) -> Self {
        Object::Sinogram(s)
    }
}

impl From<Mask> for Object {
    fn from(m: Mask) -> Self {
        Object::Mask(m)
    }
}

// Field order here is the on-disk key order.
#[derive(Debug, Serialize, Deserialize)]
struct Header {
    kind: String,
    height: usize,
    width: usize,
    spacing_mm: [f64; 2],
    dtype: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_angles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    det_spacing_mm: Option<f64>,
}

/// Serialises `obj` to RIMG bytes. Values must fit in `f32`.
pub fn encode_rimg(obj: &Object) -> Result<Vec<u8>> {
    let (header, values): (Header, Vec<f64>) = match obj {
        Object::Image(img) => (
            Header {
                kind: "image".into(),
                height: img.height(),
                width: img.width(),
                spacing_mm: [img.spacing().sy, img.spacing().sx],
                dtype: DTYPE.into(),
                n_angles: None,
                det_spacing_mm: None,
            },
            img.values().to_vec(),
        ),
        Object::Sinogram(s) => (
            Header {
                kind: "sinogram".into(),
                height: s.n_angles(),
                width: s.n_detectors(),
                spacing_mm: [s.det_spacing(), s.det_spacing()],
                dtype: DTYPE.into(),
                n_angles: Some(s.n_angles()),
                det_spacing_mm: Some(s.det_spacing()),
            },
            s.values().to_vec(),
        ),
        Object::Mask(m) => {
            let (h, w) = m.shape();
            (
                Header {
                    kind: "mask".into(),
                    height: h,
                    width: w,
                    spacing_mm: [m.spacing().sy, m.spacing().sx],
                    dtype: DTYPE.into(),
                    n_angles: None,
                    det_spacing_mm: None,
                },
                m.values().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
            )
        }
    };
    let json = serde_json::to_string(&header).expect("header serialises");
    let mut out = Vec::with_capacity(MAGIC.len() + json.len() + 1 + 4 * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(json.as_bytes());
    out.push(b'\n');
    for (i, &v) in values.iter().enumerate() {
        let f = v as f32;
        if !f.is_finite() {
            return Err(Error::InvalidImage(format!(
                "value {v} at index {i} does not fit in f32"
            )));
        }
        out.extend_from_slice(&f.to_le_bytes());
    }
    Ok(out)
}

/// Parses RIMG bytes; `path` is only used in error messages.
pub fn decode_rimg(bytes: &[u8], path: &Path) -> Result<Object> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic { path: path.into() });
    }
    let rest = &bytes[MAGIC.len()..];
    let bad = |reason: String| Error::BadHeader {
        path: path.into(),
        reason,
    };
    let nl = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad("header line is not terminated".into()))?;
    let header: Header =
        serde_json::from_slice(&rest[..nl]).map_err(|e| bad(e.to_string()))?;
    if !matches!(header.kind.as_str(), "image" | "sinogram" | "mask") {
        return Err(Error::UnknownKind {
            path: path.into(),
            kind: header.kind,
        });
    }
    if header.dtype != DTYPE {
        return Err(bad(format!("unsupported dtype `{}`", header.dtype)));
    }
    if header.height == 0 || header.width == 0 {
        return Err(bad(format!(
            "dimensions must be >= 1, got {}x{}",
            header.height, header.width
        )));
    }
    let n = header
        .height
        .checked_mul(header.width)
        .ok_or_else(|| bad("dimensions overflow".into()))?;
    let payload = &rest[nl + 1..];
    if payload.len() != 4 * n {
        return Err(Error::Truncated {
            path: path.into(),
            expected: 4 * n,
            actual: payload.len(),
        });
    }
    let values: Vec<f64> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    let with_path = |e: Error| match e {
        Error::BadHeader { .. } => e,
        other => bad(other.to_string()),
    };
    let [sy, sx] = header.spacing_mm;
    match header.kind.as_str() {
        "image" => {
            let spacing = Spacing::new(sy, sx).map_err(with_path)?;
            Ok(Object::Image(
                Image2D::new(header.height, header.width, spacing, values).map_err(with_path)?,
            ))
        }
        "mask" => {
            let spacing = Spacing::new(sy, sx).map_err(with_path)?;
            let img =
                Image2D::new(header.height, header.width, spacing, values).map_err(with_path)?;
            Ok(Object::Mask(Mask::from_image(&img).map_err(with_path)?))
        }
        _ => {
            if let Some(na) = header.n_angles {
                if na != header.height {
                    return Err(bad(format!(
                        "n_angles {na} disagrees with height {}",
                        header.height
                    )));
                }
            }
            let ds = header.det_spacing_mm.unwrap_or(sx);
            Ok(Object::Sinogram(
                Sinogram::new(header.height, header.width, ds, values).map_err(with_path)?,
            ))
        }
    }
}

pub fn write_rimg(obj: &Object, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_rimg(obj)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_rimg(path: impl AsRef<Path>) -> Result<Object> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_rimg(&bytes, path)
}

fn wrong_kind(path: &Path, want: &str, got: &Object) -> Error {
    Error::BadHeader {
        path: path.into(),
        reason: format!("expected kind `{want}`, found `{}`", got.kind()),
    }
}

pub fn read_image(path: impl AsRef<Path>) -> Result<Image2D> {
    let path = path.as_ref();
    match read_rimg(path)? {
        Object::Image(img) => Ok(img),
        other => Err(wrong_kind(path, "image", &other)),
    }
}

pub fn read_sinogram(path: impl AsRef<Path>) -> Result<Sinogram> {
    let path = path.as_ref();
    match read_rimg(path)? {
        Object::Sinogram(s) => Ok(s),
        other => Err(wrong_kind(path, "sinogram", &other)),
    }
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<Mask> {
    let path = path.as_ref();
    match read_rimg(path)? {
        Object::Mask(m) => Ok(m),
        other => Err(wrong_kind(path, "mask", &other)),
    }
}

/// Grey level for `v` under window `(center, width)`: the window maps
/// linearly onto `[0, 65535]`, values outside are clamped, and the result is
/// rounded half-up, so `v == center` gives 32768.
pub fn window_to_u16(v: f64, center: f64, width: f64) -> u16 {
    let lo = center - width / 2.0;
    let x = (v - lo) / width * 65535.0;
    (x + 0.5).floor().clamp(0.0, 65535.0) as u16
}

/// Binary 16-bit PGM (`P5`, maxval 65535, big-endian samples).
pub fn encode_pgm(img: &Image2D, center: f64, width: f64) -> Result<Vec<u8>> {
    if !(width.is_finite() && width > 0.0) || !center.is_finite() {
        return Err(Error::param(
            "window",
            format!("need finite center and width > 0, got ({center}, {width})"),
        ));
    }
    let mut out = format!("P5\n{} {}\n65535\n", img.width(), img.height()).into_bytes();
    out.reserve(2 * img.values().len());
    for &v in img.values() {
        out.extend_from_slice(&window_to_u16(v, center, width).to_be_bytes());
    }
    Ok(out)
}

pub fn export_pgm(img: &Image2D, path: impl AsRef<Path>, center: f64, width: f64) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_pgm(img, center, width)?;
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("t.rimg")
    }

    #[test]
    fn two_by_two_layout() {
        let img = Image2D::new(2, 2, Spacing::new(0.5, 0.75).unwrap(), vec![1.0, -2.0, 0.25, 3.5])
            .unwrap();
        let bytes = encode_rimg(&img.clone().into()).unwrap();
        let header = br#"{"kind":"image","height":2,"width":2,"spacing_mm":[0.5,0.75],"dtype":"f32le"}"#;
        assert_eq!(&bytes[..5], MAGIC);
        assert_eq!(&bytes[5..5 + header.len()], header);
        assert_eq!(bytes[5 + header.len()], b'\n');
        assert_eq!(bytes.len() - (6 + header.len()), 16);
        assert_eq!(decode_rimg(&bytes, p()).unwrap(), Object::Image(img));
    }

    #[test]
    fn sinogram_and_mask_roundtrip() {
        let s = Sinogram::new(2, 3, 0.5, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let bytes = encode_rimg(&s.clone().into()).unwrap();
        let text = String::from_utf8_lossy(&bytes);
        assert!(text.contains(r#""kind":"sinogram""#));
        assert!(text.contains(r#""n_angles":2,"det_spacing_mm":0.5}"#));
        assert_eq!(decode_rimg(&bytes, p()).unwrap(), Object::Sinogram(s));

        let m = Mask::new(1, 3, Spacing::UNIT, vec![true, false, true]).unwrap();
        let bytes = encode_rimg(&m.clone().into()).unwrap();
        assert!(String::from_utf8_lossy(&bytes).contains(r#""kind":"mask""#));
        assert_eq!(decode_rimg(&bytes, p()).unwrap(), Object::Mask(m));
    }

    #[test]
    fn distinct_errors() {
        let img = Image2D::filled(2, 2, Spacing::UNIT, 1.0);
        let good = encode_rimg(&img.into()).unwrap();

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(matches!(decode_rimg(&bad_magic, p()), Err(Error::BadMagic { .. })));

        let short = &good[..good.len() - 1];
        assert!(matches!(
            decode_rimg(short, p()),
            Err(Error::Truncated { expected: 16, actual: 15, .. })
        ));

        let text = String::from_utf8(good[..good.len() - 16].to_vec()).unwrap();
        let mut unknown = text.replace("\"image\"", "\"volume\"").into_bytes();
        unknown.extend_from_slice(&good[good.len() - 16..]);
        assert!(matches!(
            decode_rimg(&unknown, p()),
            Err(Error::UnknownKind { kind, .. }) if kind == "volume"
        ));

        let mut f64_dtype = text.replace("f32le", "f64le").into_bytes();
        f64_dtype.extend_from_slice(&good[good.len() - 16..]);
        assert!(matches!(decode_rimg(&f64_dtype, p()), Err(Error::BadHeader { .. })));
    }

    #[test]
    fn mask_with_fractional_value_rejected() {
        let mut bytes = MAGIC.to_vec();
        bytes.extend_from_slice(
            br#"{"kind":"mask","height":1,"width":2,"spacing_mm":[1.0,1.0],"dtype":"f32le"}"#,
        );
        bytes.push(b'\n');
        bytes.extend_from_slice(&1.0f32.to_le_bytes());
        bytes.extend_from_slice(&0.5f32.to_le_bytes());
        assert!(matches!(decode_rimg(&bytes, p()), Err(Error::BadHeader { .. })));
    }

    #[test]
    fn deterministic_bytes() {
        let img = Image2D::from_fn(3, 4, Spacing::UNIT, |r, c| (r * 4 + c) as f64 * 0.1).unwrap();
        assert_eq!(
            encode_rimg(&img.clone().into()).unwrap(),
            encode_rimg(&img.into()).unwrap()
        );
    }

    #[test]
    fn pgm_window_mapping() {
        assert_eq!(window_to_u16(40.0, 40.0, 400.0), 32768);
        assert_eq!(window_to_u16(-160.0, 40.0, 400.0), 0);
        assert_eq!(window_to_u16(-1000.0, 40.0, 400.0), 0);
        assert_eq!(window_to_u16(240.0, 40.0, 400.0), 65535);
        assert_eq!(window_to_u16(1e9, 40.0, 400.0), 65535);

        let img = Image2D::new(1, 2, Spacing::UNIT, vec![0.0, 1.0]).unwrap();
        let bytes = encode_pgm(&img, 0.5, 1.0).unwrap();
        let head = b"P5\n2 1\n65535\n";
        assert_eq!(&bytes[..head.len()], head);
        assert_eq!(&bytes[head.len()..], &[0x00, 0x00, 0xff, 0xff]);
        assert!(encode_pgm(&img, 0.5, 0.0).is_err());
    }
}
