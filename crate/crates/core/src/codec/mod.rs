//! The compression pipeline: tile and level-shift, forward DCT, quantize, and
//! the reverse chain.

pub mod format;
mod image;
mod quant;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

pub use self::image::Image;
pub use quant::{
    dequantize, quantize, QuantTable, QuantizedBlock, BASE_LUMINANCE, QUANTIZED_MAX, QUANTIZED_MIN,
};

use crate::error::{Error, Result};
use crate::transform::{Block, DctBackendId, Transform};

const LEVEL_SHIFT: f64 = 128.0;

/// Original and block-aligned dimensions of a tiled image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Geometry {
    pub width: u32,
    pub height: u32,
    pub padded_width: u32,
    pub padded_height: u32,
}

impl Geometry {
    pub fn for_size(width: u32, height: u32) -> Result<Self> {
        image::pixel_count(width, height)?;
        let pad = |n: u32| {
            n.div_ceil(8)
                .checked_mul(8)
                .ok_or_else(|| Error::invalid(format!("dimension {n} overflows when padded")))
        };
        Ok(Self {
            width,
            height,
            padded_width: pad(width)?,
            padded_height: pad(height)?,
        })
    }

    pub fn blocks_x(&self) -> usize {
        self.padded_width as usize / 8
    }

    pub fn blocks_y(&self) -> usize {
        self.padded_height as usize / 8
    }

    pub fn block_count(&self) -> usize {
        self.blocks_x() * self.blocks_y()
    }
}

/// Level-shifted blocks in row-major grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct Tiles {
    pub geometry: Geometry,
    pub blocks: Vec<Block>,
}

/// Cuts the block at grid position `(bx, by)`, replicating the last
/// row/column past the image edge.
fn extract_block(image: &Image, bx: usize, by: usize) -> Block {
    let (w, h) = (image.width() as usize, image.height() as usize);
    let pixels = image.pixels();
    let mut values = [0.0; 64];
    for r in 0..8 {
        let y = (by * 8 + r).min(h - 1);
        let row = &pixels[y * w..(y + 1) * w];
        for c in 0..8 {
            let x = (bx * 8 + c).min(w - 1);
            values[r * 8 + c] = f64::from(row[x]) - LEVEL_SHIFT;
        }
    }
    Block::from_finite(values)
}

pub fn tile_image(image: &Image) -> Tiles {
    let geometry =
        Geometry::for_size(image.width(), image.height()).expect("valid image has valid geometry");
    let blocks = (0..geometry.blocks_y())
        .flat_map(|by| (0..geometry.blocks_x()).map(move |bx| (bx, by)))
        .map(|(bx, by)| extract_block(image, bx, by))
        .collect();
    Tiles { geometry, blocks }
}

/// Undoes the level shift, rounds half away from zero and clamps to [0, 255].
fn to_pixel(v: f64) -> u8 {
    (v + LEVEL_SHIFT).round().clamp(0.0, 255.0) as u8
}

/// Writes one block into the strip of output rows it covers, cropping padding.
fn write_block(strip: &mut [u8], width: usize, bx: usize, block: &Block) {
    let rows = strip.len() / width;
    let x0 = bx * 8;
    let cols = 8.min(width - x0);
    for r in 0..rows {
        let dst = &mut strip[r * width + x0..r * width + x0 + cols];
        for (c, px) in dst.iter_mut().enumerate() {
            *px = to_pixel(block.get(r, c));
        }
    }
}

pub fn untile_image(blocks: &[Block], geometry: Geometry) -> Result<Image> {
    check_geometry(&geometry)?;
    if blocks.len() != geometry.block_count() {
        return Err(Error::invalid(format!(
            "geometry needs {} blocks, got {}",
            geometry.block_count(),
            blocks.len()
        )));
    }
    let width = geometry.width as usize;
    let mut pixels = vec![0u8; width * geometry.height as usize];
    for (strip, row) in pixels
        .chunks_mut(width * 8)
        .zip(blocks.chunks(geometry.blocks_x()))
    {
        for (bx, block) in row.iter().enumerate() {
            write_block(strip, width, bx, block);
        }
    }
    Image::new(geometry.width, geometry.height, pixels)
}

fn check_geometry(g: &Geometry) -> Result<()> {
    let expected = Geometry::for_size(g.width, g.height)?;
    if expected != *g {
        return Err(Error::invalid(format!(
            "padded size {}x{} does not match {}x{} (expected {}x{})",
            g.padded_width,
            g.padded_height,
            g.width,
            g.height,
            expected.padded_width,
            expected.padded_height
        )));
    }
    Ok(())
}

/// Quantized blocks of one image plus everything needed to reconstruct it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompressedImage {
    geometry: Geometry,
    backend: DctBackendId,
    quality: u8,
    blocks: Vec<QuantizedBlock>,
}

impl CompressedImage {
    pub fn new(
        geometry: Geometry,
        backend: DctBackendId,
        quality: u8,
        blocks: Vec<QuantizedBlock>,
    ) -> Result<Self> {
        check_geometry(&geometry)?;
        backend.validate()?;
        quant::validate_quality(quality)?;
        if blocks.len() != geometry.block_count() {
            return Err(Error::invalid(format!(
                "geometry needs {} blocks, got {}",
                geometry.block_count(),
                blocks.len()
            )));
        }
        Ok(Self {
            geometry,
            backend,
            quality,
            blocks,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn backend(&self) -> DctBackendId {
        self.backend
    }

    pub fn quality(&self) -> u8 {
        self.quality
    }

    pub fn blocks(&self) -> &[QuantizedBlock] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [QuantizedBlock] {
        &mut self.blocks
    }
}

/// How the per-block work is scheduled. Both modes produce identical bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Execution {
    #[default]
    Serial,
    Parallel {
        threads: usize,
    },
}

impl Execution {
    pub fn parallel(threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::invalid("thread count must be at least 1"));
        }
        Ok(Execution::Parallel { threads })
    }
}

/// Pools are kept per thread count so repeated runs don't pay for thread startup.
fn thread_pool(threads: usize) -> Result<Arc<rayon::ThreadPool>> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    if let Some(pool) = pools.get(&threads) {
        return Ok(pool.clone());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Arc::new)
        .map_err(|e| Error::invalid(format!("cannot start {threads} worker threads: {e}")))?;
    pools.insert(threads, pool.clone());
    Ok(pool)
}

/// Runs `op` on consecutive `chunk`-sized pieces of `data`, serially or on a pool.
fn for_each_chunk_mut<T: Send>(
    execution: Execution,
    data: &mut [T],
    chunk: usize,
    op: impl Fn(usize, &mut [T]) + Sync + Send,
) -> Result<()> {
    match execution {
        Execution::Serial => {
            data.chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| op(i, c));
        }
        Execution::Parallel { threads } => {
            if threads == 0 {
                return Err(Error::invalid("thread count must be at least 1"));
            }
            thread_pool(threads)?.install(|| {
                data.par_chunks_mut(chunk)
                    .enumerate()
                    .for_each(|(i, c)| op(i, c))
            });
        }
    }
    Ok(())
}

pub fn compress_image(
    image: &Image,
    backend: DctBackendId,
    quality: u8,
) -> Result<CompressedImage> {
    compress_image_with(image, backend, quality, Execution::Serial)
}

/// Tiles, transforms and quantizes `image`. One task per block row.
pub fn compress_image_with(
    image: &Image,
    backend: DctBackendId,
    quality: u8,
    execution: Execution,
) -> Result<CompressedImage> {
    let table = QuantTable::build(quality)?;
    let transform = Transform::new(backend)?;
    let geometry = Geometry::for_size(image.width(), image.height())?;
    let mut blocks = vec![QuantizedBlock::ZERO; geometry.block_count()];

    for_each_chunk_mut(execution, &mut blocks, geometry.blocks_x(), |by, row| {
        for (bx, out) in row.iter_mut().enumerate() {
            let block = extract_block(image, bx, by);
            *out = quantize(&transform.forward(&block), &table);
        }
    })?;
    CompressedImage::new(geometry, backend, quality, blocks)
}

pub fn decompress_image(compressed: &CompressedImage) -> Result<Image> {
    decompress_image_with(compressed, Execution::Serial)
}

/// Dequantizes, inverse-transforms and reassembles the image. One task per
/// strip of eight output rows.
pub fn decompress_image_with(compressed: &CompressedImage, execution: Execution) -> Result<Image> {
    let table = QuantTable::build(compressed.quality)?;
    let transform = Transform::new(compressed.backend)?;
    let geometry = compressed.geometry;
    let width = geometry.width as usize;
    let blocks_x = geometry.blocks_x();
    let mut pixels = vec![0u8; width * geometry.height as usize];

    for_each_chunk_mut(execution, &mut pixels, width * 8, |by, strip| {
        let row = &compressed.blocks[by * blocks_x..(by + 1) * blocks_x];
        for (bx, q) in row.iter().enumerate() {
            let block = transform.inverse(&dequantize(q, &table));
            write_block(strip, width, bx, &block);
        }
    })?;
    Image::new(geometry.width, geometry.height, pixels)
}

pub fn roundtrip(image: &Image, backend: DctBackendId, quality: u8) -> Result<Image> {
    roundtrip_with(image, backend, quality, Execution::Serial)
}

pub fn roundtrip_with(
    image: &Image,
    backend: DctBackendId,
    quality: u8,
    execution: Execution,
) -> Result<Image> {
    decompress_image_with(
        &compress_image_with(image, backend, quality, execution)?,
        execution,
    )
}
