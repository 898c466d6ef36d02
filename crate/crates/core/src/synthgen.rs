//! Deterministic synthetic stereo scenes over an exactly planar road, used
//! as ground-truth oracles by the end-to-end tests.
//!
//! A scene is built from a seeded band-limited value-noise texture. Rows
//! where the road model is positive carry disparity exactly `f(v)`; the
//! right view resamples each left row at `u + f(v)` with linear
//! interpolation (the texture lattice extends procedurally past the frame,
//! so the right image has no uncovered strip). Obstacles are fronto-
//! parallel constant-disparity rectangles — exactly the vertical ridges a
//! v-disparity road search has to reject.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::fmath;
use crate::image::{BinaryMask, DisparityMap, Image};
use crate::roadfit::{vanishing_row, RoadModel};

/// Axis-aligned rectangle of constant disparity standing on the road.
/// Covers rows `v0..v0+height` and columns `u0..u0+width`; its ground
/// contact row is `v0 + height`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub u0: usize,
    pub v0: usize,
    pub width: usize,
    pub height: usize,
    /// Constant disparity; must be at least the road disparity at the
    /// contact row, or the object would sit below the ground plane.
    pub disparity: f64,
}

/// Full description of a synthetic scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    /// Ground-truth road model `f(v) = alpha0 + alpha1 * v`, `alpha1 > 0`,
    /// with the zero crossing strictly inside the frame.
    pub alpha0: f64,
    pub alpha1: f64,
    pub texture_seed: u64,
    pub obstacles: Vec<Obstacle>,
    /// Std-dev of per-pixel Gaussian intensity noise, at most 0.1.
    pub noise_sigma: f64,
}

impl SceneParams {
    /// Road disparity at row `v`.
    pub fn f(&self, v: usize) -> f64 {
        self.alpha0 + self.alpha1 * v as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 2 || self.height < 2 {
            return Err(Error::Parameter(format!(
                "scene needs at least 2x2 pixels, got {}x{}",
                self.width, self.height
            )));
        }
        if !self.alpha0.is_finite() || !self.alpha1.is_finite() || self.alpha1 <= 0.0 {
            return Err(Error::Parameter(format!(
                "road model must have finite coefficients and positive slope, got ({}, {})",
                self.alpha0, self.alpha1
            )));
        }
        let horizon = -self.alpha0 / self.alpha1;
        if !(horizon > 0.0 && horizon < (self.height - 1) as f64) {
            return Err(Error::Parameter(format!(
                "horizon row {horizon} must lie strictly inside the frame"
            )));
        }
        if self.f(self.height - 1) >= self.width as f64 {
            return Err(Error::Parameter(format!(
                "bottom-row disparity {} reaches the image width {}",
                self.f(self.height - 1),
                self.width
            )));
        }
        if !self.noise_sigma.is_finite() || !(0.0..=0.1).contains(&self.noise_sigma) {
            return Err(Error::Parameter(format!(
                "noise_sigma must lie in [0, 0.1], got {}",
                self.noise_sigma
            )));
        }
        for (i, ob) in self.obstacles.iter().enumerate() {
            if ob.width == 0 || ob.height == 0 {
                return Err(Error::Parameter(format!("obstacle {i} has zero extent")));
            }
            if ob.u0 + ob.width > self.width || ob.v0 + ob.height >= self.height {
                return Err(Error::Parameter(format!(
                    "obstacle {i} leaves the frame (its contact row must stay inside)"
                )));
            }
            if !ob.disparity.is_finite()
                || ob.disparity < 0.0
                || ob.disparity >= self.width as f64
            {
                return Err(Error::Parameter(format!(
                    "obstacle {i} disparity {} outside [0, width)",
                    ob.disparity
                )));
            }
            let ground = self.f(ob.v0 + ob.height);
            if ground <= 0.0 {
                return Err(Error::Geometry(format!(
                    "obstacle {i} stands on row {} above the horizon",
                    ob.v0 + ob.height
                )));
            }
            if ob.disparity < ground {
                return Err(Error::Geometry(format!(
                    "obstacle {i} disparity {} is below the ground plane's {ground}",
                    ob.disparity
                )));
            }
        }
        Ok(())
    }
}

/// Generated scene plus its exact ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub left: Image,
    pub right: Image,
    pub disp: DisparityMap,
    pub road_mask: BinaryMask,
    pub model: RoadModel,
}

const CHANNEL_SALTS: [u64; 3] = [0x9E37_79B9_7F4A_7C15, 0xC2B2_AE3D_27D4_EB4F, 0x1656_67B1_9E37_79F9];
const OBSTACLE_SALT: u64 = 0xD1B5_4A32_D192_ED03;
const NOISE_SALTS: [u64; 2] = [0x5851_F42D_4C95_7F2D, 0x1405_7B7E_F767_814F];

fn hash64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn corner(seed: u64, ix: i64, iy: i64, octave: u64) -> f64 {
    let mixed = (ix as u64)
        .wrapping_mul(0x8EBC_6AF0_9C88_C6E3)
        ^ (iy as u64).wrapping_mul(0x5899_65CC_7537_4CC3)
        ^ octave.wrapping_mul(0xA24B_AED4_963E_E407);
    let h = hash64(seed ^ hash64(mixed));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Band-limited value noise in [0, 1]: three octaves (cells 24, 12, 6 px)
/// of smoothstep-blended lattice values. Defined on the whole plane, so
/// coordinates beyond the frame are fine.
fn value_noise(seed: u64, x: f64, y: f64) -> f64 {
    const CELLS: [f64; 3] = [24.0, 12.0, 6.0];
    const AMPS: [f64; 3] = [1.0, 0.5, 0.25];
    let mut total = 0.0;
    for o in 0..3 {
        let gx = x / CELLS[o];
        let gy = y / CELLS[o];
        let ix = fmath::floor(gx) as i64;
        let iy = fmath::floor(gy) as i64;
        let tx = smoothstep(gx - ix as f64);
        let ty = smoothstep(gy - iy as f64);
        let c00 = corner(seed, ix, iy, o as u64);
        let c10 = corner(seed, ix + 1, iy, o as u64);
        let c01 = corner(seed, ix, iy + 1, o as u64);
        let c11 = corner(seed, ix + 1, iy + 1, o as u64);
        let top = c00 + (c10 - c00) * tx;
        let bot = c01 + (c11 - c01) * tx;
        total += AMPS[o] * (top + (bot - top) * ty);
    }
    total / (AMPS[0] + AMPS[1] + AMPS[2])
}

/// One texture layer: per-channel seeded noise evaluated on the integer
/// pixel lattice, plus linear interpolation between lattice columns.
struct Texture {
    seeds: [u64; 3],
}

impl Texture {
    fn base(scene_seed: u64) -> Self {
        Self { seeds: CHANNEL_SALTS.map(|s| scene_seed ^ s) }
    }

    fn obstacle(scene_seed: u64, index: usize) -> Self {
        let salt = OBSTACLE_SALT ^ hash64(index as u64);
        Self { seeds: CHANNEL_SALTS.map(|s| scene_seed ^ salt ^ s) }
    }

    fn lattice(&self, c: usize, ix: i64, v: usize) -> f64 {
        value_noise(self.seeds[c], ix as f64, v as f64)
    }

    /// The channel's row linearly interpolated at fractional column `x >= 0`.
    fn lerp_x(&self, c: usize, x: f64, v: usize) -> f64 {
        let ix = fmath::floor(x) as i64;
        let t = x - ix as f64;
        let a = self.lattice(c, ix, v);
        if t == 0.0 {
            return a;
        }
        let b = self.lattice(c, ix + 1, v);
        a + (b - a) * t
    }
}

/// Builds the scene: textured stereo pair, exact disparity with invalid
/// sky, road mask excluding obstacles, and the exact road model.
pub fn generate(params: &SceneParams) -> Result<Scene> {
    params.validate()?;
    let (w, h) = (params.width, params.height);
    let base = Texture::base(params.texture_seed);

    let mut left = vec![0.0f32; w * h * 3];
    let mut right = vec![0.0f32; w * h * 3];
    let mut disp = vec![0.0f32; w * h];
    let mut valid = vec![false; w * h];
    let mut road = vec![false; w * h];

    for v in 0..h {
        let f = params.f(v);
        let is_road = f > 0.0;
        let shift = if is_road { f } else { 0.0 };
        for u in 0..w {
            let at = v * w + u;
            for c in 0..3 {
                left[at * 3 + c] = base.lattice(c, u as i64, v) as f32;
                right[at * 3 + c] = base.lerp_x(c, u as f64 + shift, v) as f32;
            }
            if is_road {
                disp[at] = f as f32;
                valid[at] = true;
                road[at] = true;
            }
        }
    }

    // Far-to-near painter's order: ascending disparity, stable on ties.
    let mut order: Vec<usize> = (0..params.obstacles.len()).collect();
    order.sort_by(|&a, &b| {
        params.obstacles[a]
            .disparity
            .total_cmp(&params.obstacles[b].disparity)
            .then(a.cmp(&b))
    });
    for i in order {
        let ob = &params.obstacles[i];
        let tex = Texture::obstacle(params.texture_seed, i);
        for v in ob.v0..ob.v0 + ob.height {
            for u in ob.u0..ob.u0 + ob.width {
                let at = v * w + u;
                for c in 0..3 {
                    left[at * 3 + c] = tex.lattice(c, u as i64, v) as f32;
                }
                disp[at] = ob.disparity as f32;
                valid[at] = true;
                road[at] = false;
            }
            // In the right view the rectangle sits `disparity` further left;
            // sample the same texture at the left-view column u_r + d.
            let lo = fmath::ceil(ob.u0 as f64 - ob.disparity) as i64;
            let hi = fmath::ceil((ob.u0 + ob.width) as f64 - ob.disparity) as i64;
            for u_r in lo.max(0)..hi.min(w as i64) {
                let at = v * w + u_r as usize;
                for c in 0..3 {
                    right[at * 3 + c] = tex.lerp_x(c, u_r as f64 + ob.disparity, v) as f32;
                }
            }
        }
    }

    if params.noise_sigma > 0.0 {
        for (img, salt) in [(&mut left, NOISE_SALTS[0]), (&mut right, NOISE_SALTS[1])] {
            let mut rng = ChaCha8Rng::seed_from_u64(params.texture_seed ^ salt);
            let normal = Normal::new(0.0f64, params.noise_sigma)
                .expect("sigma validated finite and non-negative");
            for s in img.iter_mut() {
                *s = ((*s as f64) + normal.sample(&mut rng)).clamp(0.0, 1.0) as f32;
            }
        }
    }

    let v_py = vanishing_row(params.alpha0, params.alpha1, h)?;
    Ok(Scene {
        left: Image::new(w, h, 3, left)?,
        right: Image::new(w, h, 3, right)?,
        disp: DisparityMap::new(w, h, disp, valid)?,
        road_mask: BinaryMask::new(w, h, road)?,
        model: RoadModel {
            alpha0: params.alpha0,
            alpha1: params.alpha1,
            v_py,
            fit_residual: 0.0,
        },
    })
}
