use crate::error::{Error, Result};

/// Row-major per-pixel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    width: u32,
    height: u32,
    values: Vec<T>,
}

/// Binary mask; `true` marks interior pixels.
pub type Mask = Grid<bool>;

/// Metric depth per pixel, in world units.
pub type DepthMap = Grid<f64>;

impl<T: Clone> Grid<T> {
    pub fn filled(width: u32, height: u32, value: T) -> Self {
        Grid {
            width,
            height,
            values: vec![value; width as usize * height as usize],
        }
    }
}

impl<T> Grid<T> {
    pub fn from_vec(width: u32, height: u32, values: Vec<T>) -> Result<Self> {
        if values.len() != width as usize * height as usize {
            return Err(Error::invalid(format!(
                "grid of {}x{} needs {} values, got {}",
                width,
                height,
                width as usize * height as usize,
                values.len()
            )));
        }
        Ok(Grid {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, x: u32, y: u32) -> Option<&T> {
        if x < self.width && y < self.height {
            self.values.get(y as usize * self.width as usize + x as usize)
        } else {
            None
        }
    }

    pub fn set(&mut self, x: u32, y: u32, value: T) {
        assert!(x < self.width && y < self.height, "grid index out of range");
        self.values[y as usize * self.width as usize + x as usize] = value;
    }

    /// Value under a continuous pixel position; pixel `(i, j)` covers `[i, i+1) x [j, j+1)`.
    pub fn at_position(&self, u: f64, v: f64) -> Option<&T> {
        if !(u >= 0.0 && v >= 0.0 && u < self.width as f64 && v < self.height as f64) {
            return None;
        }
        self.get(u.floor() as u32, v.floor() as u32)
    }
}

impl Mask {
    pub fn is_interior(&self, u: f64, v: f64) -> bool {
        self.at_position(u, v).copied().unwrap_or(false)
    }

    pub fn count_interior(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }
}
