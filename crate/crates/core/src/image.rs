//! 8-bit grayscale images and binary PGM (P5) I/O.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Format("image dimensions must be positive".into()));
        }
        if pixels.len() != width * height {
            return Err(Error::Format(format!(
                "{width}x{height} image needs {} samples, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// The 8×8 block at block coordinates `(bx, by)` as reals.
    pub fn block(&self, bx: usize, by: usize) -> SquareMatrix {
        SquareMatrix::from_fn(8, |r, c| self.get(bx * 8 + c, by * 8 + r) as f64)
    }

    pub fn block_u8(&self, bx: usize, by: usize) -> [[u8; 8]; 8] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.get(bx * 8 + c, by * 8 + r)))
    }

    /// Reassembles an image from row-major 8×8 blocks.
    pub fn from_blocks(blocks_x: usize, blocks_y: usize, blocks: &[[[u8; 8]; 8]]) -> Result<Self> {
        if blocks.len() != blocks_x * blocks_y {
            return Err(Error::Format(format!(
                "expected {} blocks, got {}",
                blocks_x * blocks_y,
                blocks.len()
            )));
        }
        let width = blocks_x * 8;
        Ok(Self::from_fn(width, blocks_y * 8, |x, y| {
            blocks[(y / 8) * blocks_x + x / 8][y % 8][x % 8]
        }))
    }

    pub fn read_pgm<R: Read>(reader: R) -> Result<Self> {
        let mut bytes = Vec::new();
        BufReader::new(reader).read_to_end(&mut bytes)?;
        let mut pos = 0;
        let magic = next_token(&bytes, &mut pos)?;
        if magic != b"P5" {
            return Err(Error::Format("not a binary PGM (P5) file".into()));
        }
        let width = parse_number(next_token(&bytes, &mut pos)?)?;
        let height = parse_number(next_token(&bytes, &mut pos)?)?;
        let maxval = parse_number(next_token(&bytes, &mut pos)?)?;
        if maxval != 255 {
            return Err(Error::Format(format!(
                "unsupported maxval {maxval}, need 255"
            )));
        }
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let needed = width * height;
        let raster = bytes
            .get(pos..pos + needed)
            .ok_or_else(|| Error::Format("truncated raster".into()))?;
        Self::new(width, height, raster.to_vec())
    }

    pub fn write_pgm<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = BufWriter::new(writer);
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.pixels)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_pgm(File::open(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_pgm(File::create(path)?)
    }
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(Error::Format("truncated header".into())),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace()) {
        *pos += 1;
    }
    Ok(&bytes[start..*pos])
}

fn parse_number(token: &[u8]) -> Result<usize> {
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            Error::Format(format!(
                "bad header field {:?}",
                String::from_utf8_lossy(token)
            ))
        })
}
