//! Binary checkpoint container.
//!
//! Every record starts with the header
//!
//! ```text
//! "BSNQ1" | K: u32 | L: f64 | kind: u8 | cutoff: u32
//! ```
//!
//! (all little endian) followed by a kind-specific payload. Field payloads
//! are the row-major coefficients of each component as interleaved
//! `(re, im)` f64 pairs. Wiener paths (`W`) carry no grid (`K = 0`, `L = 0`).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::noise::WienerPath;
use crate::scheme::{SchemeConfig, SchemeState, TrajectoryStats};
use crate::spectral::{Complex64, ScalarField, SpectralField, TorusGrid, VectorField};
use crate::{Error, Result};

pub const MAGIC: &[u8; 5] = b"BSNQ1";
pub const KIND_PATH: u8 = b'W';
pub const KIND_TRAJECTORY: u8 = b'T';

struct Header {
    modes: u32,
    length: f64,
    kind: u8,
    cutoff: u32,
}

impl Header {
    fn for_grid(grid: &TorusGrid, kind: u8) -> Self {
        Self {
            modes: grid.modes() as u32,
            length: grid.length(),
            kind,
            cutoff: grid.cutoff() as u32,
        }
    }

    fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::with_cutoff(self.modes as usize, self.length, self.cutoff as usize)
    }

    fn write(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&self.modes.to_le_bytes())?;
        w.write_all(&self.length.to_le_bytes())?;
        w.write_all(&[self.kind])?;
        w.write_all(&self.cutoff.to_le_bytes())?;
        Ok(())
    }

    fn read(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Checkpoint("bad magic, not a BSNQ1 container".into()));
        }
        let modes = read_u32(r)?;
        let length = read_f64(r)?;
        let mut kind = [0u8];
        r.read_exact(&mut kind)?;
        let cutoff = read_u32(r)?;
        Ok(Self {
            modes,
            length,
            kind: kind[0],
            cutoff,
        })
    }

    fn expect(&self, kind: u8) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Checkpoint(format!(
                "expected record kind '{}', found '{}'",
                kind as char, self.kind as char
            )));
        }
        Ok(())
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

fn read_f64s(r: &mut impl Read, n: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; 8 * n];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn write_f64s(w: &mut impl Write, values: &[f64]) -> Result<()> {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    w.write_all(&bytes)?;
    Ok(())
}

fn write_json(w: &mut impl Write, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_vec(value).map_err(|e| Error::Checkpoint(e.to_string()))?;
    w.write_all(&(text.len() as u64).to_le_bytes())?;
    w.write_all(&text)?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(r: &mut impl Read) -> Result<T> {
    let n = read_u64(r)? as usize;
    let mut text = vec![0u8; n];
    r.read_exact(&mut text)?;
    serde_json::from_slice(&text).map_err(|e| Error::Checkpoint(e.to_string()))
}

fn write_components<F: SpectralField>(w: &mut impl Write, field: &F) -> Result<()> {
    for comp in field.components() {
        let flat: Vec<f64> = comp.iter().flat_map(|c| [c.re, c.im]).collect();
        write_f64s(w, &flat)?;
    }
    Ok(())
}

fn read_components<F: SpectralField>(r: &mut impl Read, grid: TorusGrid) -> Result<F> {
    let mut field = F::zeros(grid);
    for comp in field.components_mut() {
        let flat = read_f64s(r, 2 * comp.len())?;
        for (c, p) in comp.iter_mut().zip(flat.chunks_exact(2)) {
            *c = Complex64::new(p[0], p[1]);
        }
    }
    Ok(field)
}

/// Writes one field record.
pub fn write_field<F: SpectralField>(w: &mut impl Write, field: &F) -> Result<()> {
    Header::for_grid(field.grid(), F::KIND.tag()).write(w)?;
    write_components(w, field)
}

/// Reads one field record of kind `F`.
pub fn read_field<F: SpectralField>(r: &mut impl Read) -> Result<F> {
    let header = Header::read(r)?;
    header.expect(F::KIND.tag())?;
    read_components(r, header.grid()?)
}

/// Writes one path record: seed, stream, `J`, `N_max`, `T`, the `J`
/// eigenvalues and the `N_max x J` increments.
pub fn write_path(w: &mut impl Write, path: &WienerPath) -> Result<()> {
    Header {
        modes: 0,
        length: 0.0,
        kind: KIND_PATH,
        cutoff: 0,
    }
    .write(w)?;
    w.write_all(&path.seed().to_le_bytes())?;
    w.write_all(&path.stream().to_le_bytes())?;
    w.write_all(&(path.modes() as u32).to_le_bytes())?;
    w.write_all(&(path.steps() as u64).to_le_bytes())?;
    w.write_all(&path.horizon().to_le_bytes())?;
    write_f64s(w, path.eigenvalues())?;
    write_f64s(w, path.increments())
}

pub fn read_path(r: &mut impl Read) -> Result<WienerPath> {
    Header::read(r)?.expect(KIND_PATH)?;
    let seed = read_u64(r)?;
    let stream = read_u64(r)?;
    let modes = read_u32(r)? as usize;
    let steps = read_u64(r)? as usize;
    let horizon = read_f64(r)?;
    let eigenvalues = read_f64s(r, modes)?;
    let increments = read_f64s(r, modes * steps)?;
    WienerPath::from_parts(seed, stream, horizon, eigenvalues, increments)
}

/// Mid-trajectory snapshot sufficient to resume a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryCheckpoint {
    /// Configuration the trajectory was computed with.
    pub config: SchemeConfig,
    pub seed: u64,
    /// Step count of the mesh (the state sits at `state.step`).
    pub steps: usize,
    pub state: SchemeState,
    pub stats: TrajectoryStats,
}

pub fn write_trajectory(w: &mut impl Write, cp: &TrajectoryCheckpoint) -> Result<()> {
    Header::for_grid(&cp.config.grid, KIND_TRAJECTORY).write(w)?;
    write_json(w, &cp.config)?;
    w.write_all(&cp.seed.to_le_bytes())?;
    w.write_all(&(cp.steps as u64).to_le_bytes())?;
    w.write_all(&(cp.state.step as u64).to_le_bytes())?;
    w.write_all(&(cp.state.picard_iters.0 as u64).to_le_bytes())?;
    w.write_all(&(cp.state.picard_iters.1 as u64).to_le_bytes())?;
    write_components(w, &cp.state.u)?;
    write_components(w, &cp.state.theta)?;
    write_json(w, &cp.stats)
}

pub fn read_trajectory(r: &mut impl Read) -> Result<TrajectoryCheckpoint> {
    let header = Header::read(r)?;
    header.expect(KIND_TRAJECTORY)?;
    let grid = header.grid()?;
    let config: SchemeConfig = read_json(r)?;
    if config.grid != grid {
        return Err(Error::Checkpoint("configuration grid disagrees with header".into()));
    }
    let seed = read_u64(r)?;
    let steps = read_u64(r)? as usize;
    let step = read_u64(r)? as usize;
    let picard_iters = (read_u64(r)? as usize, read_u64(r)? as usize);
    let u: VectorField = read_components(r, grid)?;
    let theta: ScalarField = read_components(r, grid)?;
    let stats = read_json(r)?;
    Ok(TrajectoryCheckpoint {
        config,
        seed,
        steps,
        state: SchemeState {
            step,
            u,
            theta,
            picard_iters,
        },
        stats,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

pub fn save_field<F: SpectralField>(path: impl AsRef<Path>, field: &F) -> Result<()> {
    let mut w = create(path.as_ref())?;
    write_field(&mut w, field)?;
    w.flush()?;
    Ok(())
}

pub fn load_field<F: SpectralField>(path: impl AsRef<Path>) -> Result<F> {
    read_field(&mut open(path.as_ref())?)
}

/// Saves the velocity and temperature paths as two consecutive records.
pub fn save_paths(path: impl AsRef<Path>, velocity: &WienerPath, temperature: &WienerPath) -> Result<()> {
    let mut w = create(path.as_ref())?;
    write_path(&mut w, velocity)?;
    write_path(&mut w, temperature)?;
    w.flush()?;
    Ok(())
}

pub fn load_paths(path: impl AsRef<Path>) -> Result<(WienerPath, WienerPath)> {
    let mut r = open(path.as_ref())?;
    Ok((read_path(&mut r)?, read_path(&mut r)?))
}

pub fn save_trajectory(path: impl AsRef<Path>, cp: &TrajectoryCheckpoint) -> Result<()> {
    let mut w = create(path.as_ref())?;
    write_trajectory(&mut w, cp)?;
    w.flush()?;
    Ok(())
}

pub fn load_trajectory(path: impl AsRef<Path>) -> Result<TrajectoryCheckpoint> {
    read_trajectory(&mut open(path.as_ref())?)
}
