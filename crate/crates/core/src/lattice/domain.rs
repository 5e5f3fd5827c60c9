use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Sites allowed in a single lattice unless a caller asks for more.
pub const DEFAULT_SITE_BUDGET: usize = 1 << 25;

/// Truncated half-space lattice `(eps Z)^{n-1} x eps N`.
///
/// Sites carry integer indices `(i_1, .., i_{n-1}, i_n)` with
/// `|i_k| <= lateral_halfwidth` and `0 <= i_n <= height`; the physical
/// position of a site is `eps * i`. Layer `i_n = 0` is the discrete boundary
/// plane, layers `i_n >= 1` form the bulk.
///
/// Storage is lexicographic with `i_n` slowest and the last lateral axis
/// fastest, so every layer (in particular the boundary plane) is one
/// contiguous slab of `(2 * lateral_halfwidth + 1)^{n-1}` values.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeDomain<T> {
    n: usize,
    eps: T,
    lateral: usize,
    height: usize,
    width: usize,
    plane: usize,
}

impl<T: Real> LatticeDomain<T> {
    pub fn new(n: usize, eps: T, lateral_halfwidth: usize, height: usize) -> Result<Self> {
        Self::with_budget(n, eps, lateral_halfwidth, height, DEFAULT_SITE_BUDGET)
    }

    pub fn with_budget(n: usize, eps: T, lateral_halfwidth: usize, height: usize, budget: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "dimension must be at least 1"));
        }
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(invalid(
                "eps",
                format!("spacing must be positive and finite, got {eps}"),
            ));
        }
        if height == 0 {
            return Err(invalid("height", "need at least one bulk layer"));
        }
        let width = 2 * lateral_halfwidth as u128 + 1;
        let plane = width.checked_pow((n - 1) as u32).unwrap_or(u128::MAX);
        let sites = plane.saturating_mul(height as u128 + 1);
        if sites > budget as u128 {
            return Err(Error::SiteBudgetExceeded { sites, budget });
        }
        Ok(Self {
            n,
            eps,
            lateral: lateral_halfwidth,
            height,
            width: width as usize,
            plane: plane as usize,
        })
    }

    /// Domain with spacing `eps` covering the physical box
    /// `[-lateral_extent, lateral_extent]^{n-1} x [0, height_extent]`.
    ///
    /// Both extents must be integer multiples of `eps` (up to rounding).
    pub fn from_extents(n: usize, eps: T, lateral_extent: T, height_extent: T) -> Result<Self> {
        let lateral = whole_multiple(lateral_extent, eps, "lateral_extent")?;
        let height = whole_multiple(height_extent, eps, "height_extent")?;
        Self::new(n, eps, if n == 1 { 0 } else { lateral }, height)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn eps(&self) -> T {
        self.eps
    }

    #[inline]
    pub fn lateral_halfwidth(&self) -> usize {
        self.lateral
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Sites per lateral axis, `2 * lateral_halfwidth + 1`.
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    /// Sites per layer; also the stride of the vertical axis.
    #[inline]
    pub fn plane_len(&self) -> usize {
        self.plane
    }

    #[inline]
    pub fn site_count(&self) -> usize {
        self.plane * (self.height + 1)
    }

    /// Physical half-width of the lateral box.
    pub fn lateral_extent(&self) -> T {
        self.eps * T::from_count(self.lateral)
    }

    /// Physical height of the truncated domain.
    pub fn height_extent(&self) -> T {
        self.eps * T::from_count(self.height)
    }

    /// Offset stride of lateral axis `k` (0-based, `k < n - 1`).
    #[inline]
    pub fn lateral_stride(&self, k: usize) -> usize {
        debug_assert!(k + 1 < self.n);
        self.width.pow((self.n - 2 - k) as u32)
    }

    /// Strides of all lateral axes, in axis order.
    pub fn lateral_strides(&self) -> Vec<usize> {
        (0..self.n - 1).map(|k| self.lateral_stride(k)).collect()
    }

    /// Linear offset of the site with integer indices `index`
    /// (`n - 1` lateral indices followed by the layer index).
    pub fn offset(&self, index: &[i64]) -> Option<usize> {
        if index.len() != self.n {
            return None;
        }
        let layer = index[self.n - 1];
        if layer < 0 || layer as usize > self.height {
            return None;
        }
        let mut off = 0usize;
        for &i in &index[..self.n - 1] {
            if i.unsigned_abs() as usize > self.lateral {
                return None;
            }
            off = off * self.width + (i + self.lateral as i64) as usize;
        }
        Some(layer as usize * self.plane + off)
    }

    /// Integer indices of the site stored at `offset`.
    pub fn index(&self, offset: usize) -> Vec<i64> {
        let mut out = vec![0i64; self.n];
        self.index_into(offset, &mut out);
        out
    }

    pub fn index_into(&self, offset: usize, out: &mut [i64]) {
        debug_assert!(offset < self.site_count());
        out[self.n - 1] = (offset / self.plane) as i64;
        let mut rest = offset % self.plane;
        for k in (0..self.n - 1).rev() {
            out[k] = (rest % self.width) as i64 - self.lateral as i64;
            rest /= self.width;
        }
    }

    /// Physical coordinates of the site stored at `offset`.
    pub fn position(&self, offset: usize) -> Vec<T> {
        self.index(offset)
            .into_iter()
            .map(|i| self.eps * T::from_i64(i).expect("index fits"))
            .collect()
    }

    #[inline]
    pub fn layer(&self, offset: usize) -> usize {
        offset / self.plane
    }

    /// Largest `|i_k|` over the lateral indices of a site.
    pub fn lateral_radius_index(&self, offset: usize) -> usize {
        let mut rest = offset % self.plane;
        let mut r = 0usize;
        for _ in 0..self.n - 1 {
            let i = (rest % self.width) as i64 - self.lateral as i64;
            r = r.max(i.unsigned_abs() as usize);
            rest /= self.width;
        }
        r
    }

    /// True for sites on a truncation face: top layer or outermost lateral ring.
    pub fn is_face(&self, offset: usize) -> bool {
        self.layer(offset) == self.height || (self.n > 1 && self.lateral_radius_index(offset) == self.lateral)
    }

    /// Bulk site whose full `2n`-point stencil lies inside the truncated domain.
    pub fn is_interior(&self, offset: usize) -> bool {
        let layer = self.layer(offset);
        layer >= 1 && !self.is_face(offset)
    }

    /// Boundary-plane site whose `2n - 1`-point stencil lies inside the domain.
    pub fn is_active_boundary(&self, offset: usize) -> bool {
        self.layer(offset) == 0 && !self.is_face(offset)
    }

    pub fn interior_sites(&self) -> Vec<usize> {
        (self.plane..self.site_count())
            .filter(|&o| self.is_interior(o))
            .collect()
    }

    pub fn active_boundary_sites(&self) -> Vec<usize> {
        (0..self.plane).filter(|&o| self.is_active_boundary(o)).collect()
    }

    pub fn face_sites(&self) -> Vec<usize> {
        (0..self.site_count()).filter(|&o| self.is_face(o)).collect()
    }

    /// Offset of the nearest site not on a truncation face, used by the
    /// zero-normal-difference closure. Faces on the boundary plane map to the
    /// nearest active boundary site; non-face sites map to themselves.
    pub fn inward_neighbor(&self, offset: usize) -> usize {
        if !self.is_face(offset) || (self.n > 1 && self.lateral == 0) {
            return offset;
        }
        let mut idx = self.index(offset);
        let layer = idx[self.n - 1];
        let inner = self.lateral as i64 - 1;
        for i in &mut idx[..self.n - 1] {
            *i = (*i).clamp(-inner, inner);
        }
        idx[self.n - 1] = layer.min(self.height as i64 - 1);
        self.offset(&idx).expect("clamped index stays inside")
    }

    /// Same site set and spacing.
    pub fn same_lattice(&self, other: &Self) -> bool {
        self == other
    }
}

fn whole_multiple<T: Real>(extent: T, eps: T, name: &'static str) -> Result<usize> {
    if !(extent >= T::zero()) {
        return Err(invalid(name, "extent must be nonnegative"));
    }
    let ratio = extent / eps;
    let k = ratio.round();
    if (ratio - k).abs() > T::lit(1e-6) * T::one().max(ratio) {
        return Err(invalid(
            name,
            format!("extent {extent} is not a whole multiple of eps {eps}"),
        ));
    }
    k.to_usize().ok_or_else(|| invalid(name, "extent too large"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_counts() {
        let d = LatticeDomain::new(1, 0.5, 0, 8).unwrap();
        assert_eq!(d.site_count(), 9);
        assert_eq!(d.plane_len(), 1);
        assert_eq!(LatticeDomain::new(2, 0.25, 4, 3).unwrap().site_count(), 36);
        assert_eq!(LatticeDomain::new(3, 1.0, 2, 2).unwrap().site_count(), 75);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(LatticeDomain::new(0, 1.0, 1, 1).is_err());
        assert!(LatticeDomain::new(2, 0.0, 1, 1).is_err());
        assert!(LatticeDomain::new(2, -1.0, 1, 1).is_err());
        assert!(LatticeDomain::new(2, 1.0, 1, 0).is_err());
        match LatticeDomain::with_budget(3, 1.0, 100, 100, 1000) {
            Err(Error::SiteBudgetExceeded { sites, budget }) => {
                assert_eq!(sites, 201 * 201 * 101);
                assert_eq!(budget, 1000);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn boundary_plane_is_first_slab() {
        let d = LatticeDomain::new(3, 1.0, 2, 2).unwrap();
        for o in 0..d.site_count() {
            assert_eq!(d.index(o)[2] == 0, o < d.plane_len());
            assert_eq!(d.offset(&d.index(o)), Some(o));
        }
        assert_eq!(d.offset(&[0, 0, 3]), None);
        assert_eq!(d.offset(&[3, 0, 0]), None);
        assert_eq!(d.offset(&[0, 0]), None);
    }

    #[test]
    fn site_classes() {
        let d = LatticeDomain::new(2, 1.0, 2, 3).unwrap();
        // 5 x 4 sites: interior is 3 lateral x 2 layers.
        assert_eq!(d.interior_sites().len(), 6);
        assert_eq!(d.active_boundary_sites().len(), 3);
        assert_eq!(d.face_sites().len(), 20 - 6 - 3);
        let corner = d.offset(&[2, 3]).unwrap();
        assert_eq!(d.index(d.inward_neighbor(corner)), vec![1, 2]);
        let edge = d.offset(&[-2, 0]).unwrap();
        assert_eq!(d.index(d.inward_neighbor(edge)), vec![-1, 0]);
        let inside = d.offset(&[1, 1]).unwrap();
        assert_eq!(d.inward_neighbor(inside), inside);
    }

    #[test]
    fn extents_must_be_multiples() {
        let d = LatticeDomain::from_extents(2, 0.025, 4.0, 3.2).unwrap();
        assert_eq!(d.lateral_halfwidth(), 160);
        assert_eq!(d.height(), 128);
        assert!(LatticeDomain::from_extents(2, 0.3, 1.0, 0.9).is_err());
    }
}
