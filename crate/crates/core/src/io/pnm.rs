//! Binary PPM (`P6`, maxval 255) encode/decode, plus PAM (`P7`) decode for
//! 4-channel input feeding the channel-truncation path.

use std::fs;
use std::path::Path;

use crate::augment::Image;
use crate::error::{Error, Result};

fn format_err(label: &str, reason: impl Into<String>) -> Error {
    Error::Format {
        path: label.to_string(),
        reason: reason.into(),
    }
}

fn is_pnm_space(byte: u8) -> bool {
    matches!(byte, b' ' | b'\t' | b'\r' | b'\n')
}

/// Read one whitespace-delimited header token, skipping `#` comments.
fn next_token<'a>(bytes: &mut &'a [u8], label: &str) -> Result<&'a [u8]> {
    loop {
        while let Some((&first, rest)) = bytes.split_first() {
            if is_pnm_space(first) {
                *bytes = rest;
            } else {
                break;
            }
        }
        if bytes.first() == Some(&b'#') {
            let end = bytes
                .iter()
                .position(|&b| b == b'\n')
                .map(|i| i + 1)
                .unwrap_or(bytes.len());
            *bytes = &bytes[end..];
            continue;
        }
        break;
    }
    if bytes.is_empty() {
        return Err(format_err(label, "unexpected end of header"));
    }
    let end = bytes
        .iter()
        .position(|&b| is_pnm_space(b))
        .unwrap_or(bytes.len());
    let (token, rest) = bytes.split_at(end);
    *bytes = rest;
    Ok(token)
}

fn parse_number(token: &[u8], what: &str, label: &str) -> Result<u32> {
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| {
            format_err(
                label,
                format!("invalid {what}: `{}`", String::from_utf8_lossy(token)),
            )
        })
}

fn decode_p6(mut bytes: &[u8], label: &str) -> Result<Image> {
    let width = parse_number(next_token(&mut bytes, label)?, "width", label)?;
    let height = parse_number(next_token(&mut bytes, label)?, "height", label)?;
    let maxval = parse_number(next_token(&mut bytes, label)?, "maxval", label)?;
    if maxval != 255 {
        return Err(format_err(
            label,
            format!("maxval must be 255, got {maxval}"),
        ));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.split_first() {
        Some((&b, rest)) if is_pnm_space(b) => bytes = rest,
        _ => return Err(format_err(label, "missing separator before pixel data")),
    }
    let expected = width as usize * height as usize * 3;
    if bytes.len() != expected {
        return Err(format_err(
            label,
            format!("expected {expected} raster bytes, found {}", bytes.len()),
        ));
    }
    Image::new(width, height, 3, bytes.to_vec())
}

fn decode_p7(bytes: &[u8], label: &str) -> Result<Image> {
    let mut width = None;
    let mut height = None;
    let mut depth = None;
    let mut maxval = None;
    let mut cursor = bytes;
    loop {
        let line_end = cursor
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| format_err(label, "unterminated PAM header"))?;
        let line = &cursor[..line_end];
        cursor = &cursor[line_end + 1..];
        let text = std::str::from_utf8(line)
            .map_err(|_| format_err(label, "non-UTF-8 PAM header line"))?
            .trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if text == "ENDHDR" {
            break;
        }
        let (key, value) = text
            .split_once(char::is_whitespace)
            .ok_or_else(|| format_err(label, format!("malformed PAM header line `{text}`")))?;
        let value = value.trim();
        match key {
            "WIDTH" => width = Some(parse_number(value.as_bytes(), "WIDTH", label)?),
            "HEIGHT" => height = Some(parse_number(value.as_bytes(), "HEIGHT", label)?),
            "DEPTH" => depth = Some(parse_number(value.as_bytes(), "DEPTH", label)?),
            "MAXVAL" => maxval = Some(parse_number(value.as_bytes(), "MAXVAL", label)?),
            "TUPLTYPE" => {}
            other => {
                return Err(format_err(
                    label,
                    format!("unknown PAM header key `{other}`"),
                ))
            }
        }
    }
    let width = width.ok_or_else(|| format_err(label, "PAM header missing WIDTH"))?;
    let height = height.ok_or_else(|| format_err(label, "PAM header missing HEIGHT"))?;
    let depth = depth.ok_or_else(|| format_err(label, "PAM header missing DEPTH"))?;
    let maxval = maxval.ok_or_else(|| format_err(label, "PAM header missing MAXVAL"))?;
    if maxval != 255 {
        return Err(format_err(
            label,
            format!("maxval must be 255, got {maxval}"),
        ));
    }
    if depth != 3 && depth != 4 {
        return Err(format_err(
            label,
            format!("DEPTH must be 3 or 4, got {depth}"),
        ));
    }
    let expected = width as usize * height as usize * depth as usize;
    if cursor.len() != expected {
        return Err(format_err(
            label,
            format!("expected {expected} raster bytes, found {}", cursor.len()),
        ));
    }
    Image::new(width, height, depth as u8, cursor.to_vec())
}

/// Decode a P6 or P7 image from raw bytes. `label` names the source in
/// error messages.
pub fn decode(bytes: &[u8], label: &str) -> Result<Image> {
    if let Some(rest) = bytes.strip_prefix(b"P6") {
        decode_p6(rest, label)
    } else if let Some(rest) = bytes.strip_prefix(b"P7\n") {
        decode_p7(rest, label)
    } else {
        Err(format_err(
            label,
            "unrecognized magic: expected `P6` or `P7`",
        ))
    }
}

/// Encode a 3-channel image as binary PPM. The header is always
/// `P6\n{width} {height}\n255\n`, so identical images encode to identical
/// bytes.
pub fn encode_ppm(img: &Image) -> Result<Vec<u8>> {
    if img.channels() != 3 {
        return Err(Error::UnsupportedChannels {
            expected: "3",
            actual: img.channels(),
        });
    }
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    Ok(out)
}

pub fn read_image(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    decode(&bytes, &path.display().to_string())
}

pub fn write_ppm(path: &Path, img: &Image) -> Result<()> {
    let bytes = encode_ppm(img)?;
    fs::write(path, bytes).map_err(|e| Error::io(path.display().to_string(), e))
}
