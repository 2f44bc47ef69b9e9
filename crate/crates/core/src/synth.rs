//! Procedural test images.
//!
//! [`SpiralGalaxy`] renders a two-armed grand-design spiral (bulge,
//! exponential disk, logarithmic arms, a companion blob) over a faint flat
//! sky. Sampling it gives a noisy point cloud with thin elongated
//! structures next to isotropic background, which is what the anisotropic
//! search and density examples need. [`test_card`] gives a colored scene
//! for tessellation.

use std::f64::consts::PI;

use crate::image::Image;

#[derive(Debug, Clone, PartialEq)]
pub struct SpiralGalaxy {
    pub width: usize,
    pub height: usize,
    /// Flat sky level (gray units, 0..255 per channel).
    pub sky: f64,
    pub bulge_radius: f64,
    pub disk_scale: f64,
    /// Arms run from `arm_start` to `arm_end` pixels from the center.
    pub arm_start: f64,
    pub arm_end: f64,
    /// Gaussian half-width of an arm across its ridge, in pixels.
    pub arm_width: f64,
    /// Pitch angle of the logarithmic spiral, radians.
    pub pitch: f64,
    /// Ridge angle at `arm_start`.
    pub phase: f64,
}

impl SpiralGalaxy {
    /// 400 x 300 frame.
    pub fn m51_like() -> Self {
        Self {
            width: 400,
            height: 300,
            sky: 12.0,
            bulge_radius: 9.0,
            disk_scale: 38.0,
            arm_start: 16.0,
            arm_end: 125.0,
            arm_width: 4.5,
            pitch: 0.33,
            phase: 0.4,
        }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.width as f64 / 2.0, self.height as f64 / 2.0)
    }

    /// Ridge angle of arm `k` (0 or 1) at radius `r`.
    pub fn ridge_angle(&self, r: f64, k: usize) -> f64 {
        self.phase + (r / self.arm_start).ln() / self.pitch.tan() + k as f64 * PI
    }

    /// Point on the ridge of arm `k` at radius `r`.
    pub fn ridge_point(&self, r: f64, k: usize) -> [f64; 2] {
        let (cx, cy) = self.center();
        let t = self.ridge_angle(r, k);
        [cx + r * t.cos(), cy + r * t.sin()]
    }

    /// Companion position: just beyond the end of arm 0.
    pub fn companion(&self) -> [f64; 2] {
        self.ridge_point(self.arm_end * 1.08, 0)
    }

    fn arm_taper(&self, r: f64) -> f64 {
        let rise = ((r - self.arm_start) / 10.0).clamp(0.0, 1.0);
        let fall = ((self.arm_end - r) / 15.0).clamp(0.0, 1.0);
        rise * fall
    }

    /// Distance, across the ridge, from `(x, y)` to the nearest arm.
    pub fn arm_offset(&self, x: f64, y: f64) -> f64 {
        let (cx, cy) = self.center();
        let (dx, dy) = (x - cx, y - cy);
        let r = dx.hypot(dy).max(1e-9);
        let theta = dy.atan2(dx);
        // arms repeat every pi in angle
        let mut delta = (theta - self.ridge_angle(r, 0)).rem_euclid(PI);
        if delta > PI / 2.0 {
            delta -= PI;
        }
        (r * delta * self.pitch.sin()).abs()
    }

    /// Components (sky, bulge, disk, arms, companion) at a position.
    fn components(&self, x: f64, y: f64) -> [f64; 5] {
        let (cx, cy) = self.center();
        let r = (x - cx).hypot(y - cy);
        let bulge = 230.0 * (-0.5 * (r / self.bulge_radius).powi(2)).exp();
        let edge = ((self.arm_end + 10.0 - r) / 20.0).clamp(0.0, 1.0);
        let disk = 55.0 * (-r / self.disk_scale).exp() * edge;
        let off = self.arm_offset(x, y);
        let arms = 190.0 * self.arm_taper(r) * (-0.5 * (off / self.arm_width).powi(2)).exp();
        let [qx, qy] = self.companion();
        let rc = (x - qx).hypot(y - qy);
        let companion = 160.0 * (-0.5 * (rc / 7.0).powi(2)).exp();
        [self.sky, bulge, disk, arms, companion]
    }

    /// Mean channel intensity at a position, before quantization.
    pub fn intensity(&self, x: f64, y: f64) -> f64 {
        self.components(x, y).iter().sum::<f64>().min(255.0)
    }

    /// Whether a position lies in flat sky: no galaxy light above
    /// `threshold` of the sky level within `radius`.
    pub fn is_sky(&self, x: f64, y: f64, radius: f64, threshold: f64) -> bool {
        let (cx, cy) = self.center();
        let r = (x - cx).hypot(y - cy);
        let [qx, qy] = self.companion();
        let rc = (x - qx).hypot(y - qy);
        let reach = r - radius;
        let edge_ok = x - radius >= 0.0
            && y - radius >= 0.0
            && x + radius <= self.width as f64
            && y + radius <= self.height as f64;
        let disk_at = 55.0 * (-reach.max(0.0) / self.disk_scale).exp()
            * ((self.arm_end + 10.0 - reach) / 20.0).clamp(0.0, 1.0);
        edge_ok && reach > self.arm_end && rc - radius > 35.0 && disk_at < threshold * self.sky
    }

    pub fn render(&self) -> Image {
        let mut data = Vec::with_capacity(self.width * self.height * 3);
        for j in 0..self.height {
            for i in 0..self.width {
                let (x, y) = (i as f64 + 0.5, j as f64 + 0.5);
                let [sky, bulge, disk, arms, comp] = self.components(x, y);
                // arms lean blue, bulge and companion lean yellow
                let rgb = [
                    sky + 1.05 * bulge + disk + 0.85 * arms + 1.1 * comp,
                    sky + bulge + disk + 0.95 * arms + comp,
                    sky + 0.9 * bulge + disk + 1.2 * arms + 0.9 * comp,
                ];
                data.extend(rgb.iter().map(|v| v.round().clamp(0.0, 255.0) as u8));
            }
        }
        Image::new_rgb(self.width, self.height, data).expect("sized buffer")
    }
}

/// A 3-channel scene with smooth gradients, a bright disk, a dark ellipse
/// and a diagonal band; used for tessellation demos.
pub fn test_card(width: usize, height: usize) -> Image {
    let (w, h) = (width as f64, height as f64);
    let mut data = Vec::with_capacity(width * height * 3);
    for j in 0..height {
        for i in 0..width {
            let (x, y) = ((i as f64 + 0.5) / w, (j as f64 + 0.5) / h);
            let mut rgb = [40.0 + 120.0 * x, 60.0 + 80.0 * y, 150.0 - 90.0 * x * y];
            let disk = ((x - 0.62).powi(2) + (y - 0.38).powi(2)).sqrt();
            if disk < 0.22 {
                rgb = [235.0 - 200.0 * disk, 190.0 - 150.0 * disk, 140.0];
            }
            let ex = (x - 0.3) / 0.16;
            let ey = (y - 0.7) / 0.08;
            if ex * ex + ey * ey < 1.0 {
                rgb = [30.0, 25.0, 60.0];
            }
            if (y - 0.9 * x - 0.05).abs() < 0.03 {
                rgb = [250.0, 250.0, 250.0];
            }
            data.extend(rgb.iter().map(|v| v.round().clamp(0.0, 255.0) as u8));
        }
    }
    Image::new_rgb(width, height, data).expect("sized buffer")
}
