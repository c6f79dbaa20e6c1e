//! GIF89a writer: uniform 8-8-4 global palette, NETSCAPE looping and an
//! LZW encoder.

use std::fs;
use std::path::Path;

use super::frames::FrameSet;
use super::raster::Rgb;
use crate::error::{Error, Result};

pub const MAX_GIF_SIDE: u32 = 65_535;

const MIN_CODE_SIZE: u8 = 8;
const MAX_CODE_SIZE: u8 = 12;
const MAX_CODES: u16 = 1 << MAX_CODE_SIZE;

/// 256 colours: 8 red levels, 8 green levels, 4 blue levels, evenly spaced
/// from 0 to 255.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformPalette;

impl UniformPalette {
    fn level(v: u8, steps: u32) -> u32 {
        (v as u32 * steps + 127) / 255
    }

    pub fn index(&self, c: Rgb) -> u8 {
        let r = Self::level(c.0, 7);
        let g = Self::level(c.1, 7);
        let b = Self::level(c.2, 3);
        ((r << 5) | (g << 2) | b) as u8
    }

    pub fn color(&self, index: u8) -> Rgb {
        let i = index as u32;
        let scale = |v: u32, steps: u32| ((v * 255 + steps / 2) / steps) as u8;
        Rgb(scale(i >> 5, 7), scale((i >> 2) & 7, 7), scale(i & 3, 3))
    }

    pub fn table(&self) -> Vec<u8> {
        (0..=255u8)
            .flat_map(|i| {
                let c = self.color(i);
                [c.0, c.1, c.2]
            })
            .collect()
    }
}

struct BitWriter {
    bytes: Vec<u8>,
    acc: u32,
    nbits: u8,
}

impl BitWriter {
    fn new() -> Self {
        Self {
            bytes: Vec::new(),
            acc: 0,
            nbits: 0,
        }
    }

    fn write(&mut self, code: u16, size: u8) {
        self.acc |= (code as u32) << self.nbits;
        self.nbits += size;
        while self.nbits >= 8 {
            self.bytes.push(self.acc as u8);
            self.acc >>= 8;
            self.nbits -= 8;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.bytes.push(self.acc as u8);
        }
        self.bytes
    }
}

/// Dictionary as a trie: `children[node][byte]` is the code for the string
/// `node + byte`, or 0 when absent (0 is never a valid child code).
struct Dictionary {
    children: Vec<[u16; 256]>,
}

impl Dictionary {
    fn new() -> Self {
        let mut d = Self {
            children: Vec::with_capacity(MAX_CODES as usize),
        };
        d.reset();
        d
    }

    fn reset(&mut self) {
        self.children.clear();
        // Roots, clear and end-of-information codes.
        self.children.resize(258, [0; 256]);
    }

    fn next_code(&self) -> u16 {
        self.children.len() as u16
    }

    fn get(&self, prefix: u16, byte: u8) -> Option<u16> {
        match self.children[prefix as usize][byte as usize] {
            0 => None,
            c => Some(c),
        }
    }

    fn insert(&mut self, prefix: u16, byte: u8) {
        let code = self.next_code();
        self.children[prefix as usize][byte as usize] = code;
        self.children.push([0; 256]);
    }
}

fn lzw_encode(indices: &[u8]) -> Vec<u8> {
    let clear: u16 = 1 << MIN_CODE_SIZE;
    let eoi = clear + 1;
    let mut out = BitWriter::new();
    let mut dict = Dictionary::new();
    let mut size = MIN_CODE_SIZE + 1;

    // Emits `code`, then widens the code size once the next free code no
    // longer fits (the decoder lags one entry behind).
    let emit = |out: &mut BitWriter, size: &mut u8, code: u16, next: u16| {
        out.write(code, *size);
        if next >= (1u16 << *size) && *size < MAX_CODE_SIZE {
            *size += 1;
        }
    };

    out.write(clear, size);
    let Some((&first, rest)) = indices.split_first() else {
        out.write(eoi, size);
        return out.finish();
    };
    let mut prefix = first as u16;
    for &byte in rest {
        if let Some(code) = dict.get(prefix, byte) {
            prefix = code;
            continue;
        }
        emit(&mut out, &mut size, prefix, dict.next_code());
        if dict.next_code() < MAX_CODES {
            dict.insert(prefix, byte);
        } else {
            out.write(clear, size);
            dict.reset();
            size = MIN_CODE_SIZE + 1;
        }
        prefix = byte as u16;
    }
    emit(&mut out, &mut size, prefix, dict.next_code());
    out.write(eoi, size);
    out.finish()
}

fn push_u16(buf: &mut Vec<u8>, v: u16) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_sub_blocks(buf: &mut Vec<u8>, data: &[u8]) {
    for chunk in data.chunks(255) {
        buf.push(chunk.len() as u8);
        buf.extend_from_slice(chunk);
    }
    buf.push(0);
}

/// Encodes an animated GIF89a that loops forever with `delay` centiseconds
/// per frame.
pub fn encode_gif(fs: &FrameSet, delay: u16) -> Result<Vec<u8>> {
    let first = fs
        .frames
        .first()
        .ok_or_else(|| Error::domain("GIF needs at least one frame"))?;
    let (w, h) = (first.width(), first.height());
    if w > MAX_GIF_SIDE || h > MAX_GIF_SIDE {
        return Err(Error::domain(format!(
            "GIF frames are limited to {MAX_GIF_SIDE}px per side, got {w}x{h}"
        )));
    }
    if fs.frames.iter().any(|f| f.width() != w || f.height() != h) {
        return Err(Error::domain("all GIF frames must share one size"));
    }
    let palette = UniformPalette;

    let mut buf = Vec::new();
    buf.extend_from_slice(b"GIF89a");
    push_u16(&mut buf, w as u16);
    push_u16(&mut buf, h as u16);
    // Global table present, 8-bit colour resolution, 256 entries.
    buf.extend_from_slice(&[0xF7, 0, 0]);
    buf.extend_from_slice(&palette.table());
    // NETSCAPE2.0 application extension, loop count 0 = forever.
    buf.extend_from_slice(&[0x21, 0xFF, 0x0B]);
    buf.extend_from_slice(b"NETSCAPE2.0");
    buf.extend_from_slice(&[0x03, 0x01, 0x00, 0x00, 0x00]);

    for frame in &fs.frames {
        // Graphic control extension: disposal "do not dispose", no
        // transparency.
        buf.extend_from_slice(&[0x21, 0xF9, 0x04, 0x04]);
        push_u16(&mut buf, delay);
        buf.extend_from_slice(&[0x00, 0x00]);

        buf.push(0x2C);
        push_u16(&mut buf, 0);
        push_u16(&mut buf, 0);
        push_u16(&mut buf, w as u16);
        push_u16(&mut buf, h as u16);
        buf.push(0x00);

        let indices: Vec<u8> = frame.pixels().map(|c| palette.index(c)).collect();
        buf.push(MIN_CODE_SIZE);
        push_sub_blocks(&mut buf, &lzw_encode(&indices));
    }
    buf.push(0x3B);
    Ok(buf)
}

pub fn write_gif(fs: &FrameSet, path: &Path, delay: u16) -> Result<()> {
    let bytes = encode_gif(fs, delay)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}


#[cfg(test)]
mod tests {
    use super::*;

    /// Reference LZW decoder written from the format description.
    fn lzw_decode(data: &[u8], min_size: u8) -> Vec<u8> {
        let clear = 1usize << min_size;
        let eoi = clear + 1;
        let mut size = min_size + 1;
        let mut table: Vec<Vec<u8>> = (0..clear).map(|i| vec![i as u8]).collect();
        table.push(vec![]);
        table.push(vec![]);
        let mut out = Vec::new();
        let mut prev: Option<Vec<u8>> = None;
        let (mut acc, mut nbits, mut pos) = (0u32, 0u8, 0usize);
        loop {
            while nbits < size {
                acc |= (data[pos] as u32) << nbits;
                pos += 1;
                nbits += 8;
            }
            let code = (acc & ((1 << size) - 1)) as usize;
            acc >>= size;
            nbits -= size;
            if code == clear {
                table.truncate(clear + 2);
                size = min_size + 1;
                prev = None;
                continue;
            }
            if code == eoi {
                return out;
            }
            let entry = if code < table.len() {
                table[code].clone()
            } else {
                let mut p = prev.clone().unwrap();
                p.push(p[0]);
                p
            };
            out.extend_from_slice(&entry);
            if let Some(p) = prev {
                let mut e = p;
                e.push(entry[0]);
                table.push(e);
                if table.len() == (1 << size) && size < 12 {
                    size += 1;
                }
            }
            prev = Some(entry);
        }
    }

    #[test]
    fn lzw_round_trip_with_table_resets() {
        let mut state = 12345u32;
        let mut data = Vec::new();
        for _ in 0..40_000 {
            state = state.wrapping_mul(1_103_515_245).wrapping_add(12_345);
            data.push((state >> 16) as u8);
        }
        data.extend(std::iter::repeat_n(7u8, 10_000));
        assert_eq!(lzw_decode(&lzw_encode(&data), 8), data);
        assert_eq!(lzw_decode(&lzw_encode(&[3]), 8), vec![3]);
        assert_eq!(lzw_decode(&lzw_encode(&[]), 8), Vec::<u8>::new());
    }

    #[test]
    fn palette_exact_colors() {
        let p = UniformPalette;
        for c in [Rgb::WHITE, Rgb::BLACK, Rgb::GREEN, Rgb(255, 0, 0), Rgb(0, 0, 255)] {
            assert_eq!(p.color(p.index(c)), c);
        }
        assert_eq!(p.table().len(), 768);
    }
}
