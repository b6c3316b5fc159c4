use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;

struct TensorData {
    shape: Vec<usize>,
    values: Vec<f64>,
    grad: Vec<f64>,
    requires_grad: bool,
}

/// A dense, row-major, double-precision tensor with a same-shape gradient
/// accumulator.
///
/// `Tensor` is a cheap shared handle: cloning it clones the handle, not the
/// storage. All paper-scale shapes are vectors and matrices, so only 1-D and
/// 2-D shapes are constructed in practice; the storage itself is
/// shape-agnostic. Gradients accumulate until [`Tensor::zero_grad`] is
/// called.
#[derive(Clone)]
pub struct Tensor {
    inner: Rc<RefCell<TensorData>>,
}

impl Tensor {
    pub fn from_vec(shape: &[usize], values: Vec<f64>) -> Tensor {
        let n: usize = shape.iter().product();
        assert_eq!(
            n,
            values.len(),
            "shape {:?} does not match value count {}",
            shape,
            values.len()
        );
        Tensor {
            inner: Rc::new(RefCell::new(TensorData {
                shape: shape.to_vec(),
                grad: vec![0.0; values.len()],
                values,
                requires_grad: false,
            })),
        }
    }

    pub fn zeros(shape: &[usize]) -> Tensor {
        let n: usize = shape.iter().product();
        Tensor::from_vec(shape, vec![0.0; n])
    }

    /// A 1-element tensor; scalars are shape `[1]` throughout.
    pub fn scalar(v: f64) -> Tensor {
        Tensor::from_vec(&[1], vec![v])
    }

    /// A tensor that participates in gradient accumulation.
    pub fn parameter(shape: &[usize], values: Vec<f64>) -> Tensor {
        let t = Tensor::from_vec(shape, values);
        t.set_requires_grad(true);
        t
    }

    pub fn shape(&self) -> Vec<usize> {
        self.inner.borrow().shape.clone()
    }

    pub fn len(&self) -> usize {
        self.inner.borrow().values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_scalar(&self) -> bool {
        self.len() == 1
    }

    /// Number of rows of a 2-D tensor, or 1 for 1-D.
    pub fn rows(&self) -> usize {
        let d = self.inner.borrow();
        if d.shape.len() == 2 {
            d.shape[0]
        } else {
            1
        }
    }

    pub fn ndim(&self) -> usize {
        self.inner.borrow().shape.len()
    }

    pub fn values(&self) -> Vec<f64> {
        self.inner.borrow().values.clone()
    }

    /// Runs `f` over the value slice without copying.
    pub fn with_values<R>(&self, f: impl FnOnce(&[f64]) -> R) -> R {
        f(&self.inner.borrow().values)
    }

    /// Value of a scalar tensor.
    pub fn value(&self) -> f64 {
        let d = self.inner.borrow();
        assert_eq!(d.values.len(), 1, "value() requires a scalar tensor");
        d.values[0]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.inner.borrow().values[i]
    }

    pub fn set(&self, i: usize, v: f64) {
        self.inner.borrow_mut().values[i] = v;
    }

    pub fn set_values(&self, values: &[f64]) {
        let mut d = self.inner.borrow_mut();
        assert_eq!(d.values.len(), values.len());
        d.values.copy_from_slice(values);
    }

    pub fn grad(&self) -> Vec<f64> {
        self.inner.borrow().grad.clone()
    }

    pub fn with_grad<R>(&self, f: impl FnOnce(&[f64]) -> R) -> R {
        f(&self.inner.borrow().grad)
    }

    pub fn zero_grad(&self) {
        self.inner.borrow_mut().grad.fill(0.0);
    }

    pub fn accumulate_grad(&self, adjoint: &[f64]) {
        let mut d = self.inner.borrow_mut();
        debug_assert_eq!(d.grad.len(), adjoint.len());
        for (g, a) in d.grad.iter_mut().zip(adjoint) {
            *g += a;
        }
    }

    /// In-place `values += factor * grad`; used by the SGD update.
    pub fn apply_grad_scaled(&self, factor: f64) {
        let mut d = self.inner.borrow_mut();
        let TensorData { values, grad, .. } = &mut *d;
        for (v, g) in values.iter_mut().zip(grad.iter()) {
            *v += factor * *g;
        }
    }

    pub fn requires_grad(&self) -> bool {
        self.inner.borrow().requires_grad
    }

    pub fn set_requires_grad(&self, on: bool) {
        self.inner.borrow_mut().requires_grad = on;
    }

    /// Identity of the underlying storage; two handles to the same tensor
    /// share it.
    pub(crate) fn storage_id(&self) -> usize {
        Rc::as_ptr(&self.inner) as usize
    }

    /// True when both handles point at the same storage.
    pub fn same_storage(&self, other: &Tensor) -> bool {
        Rc::ptr_eq(&self.inner, &other.inner)
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.inner.borrow();
        f.debug_struct("Tensor")
            .field("shape", &d.shape)
            .field("values", &d.values)
            .field("requires_grad", &d.requires_grad)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_roundtrip() {
        let t = Tensor::scalar(2.5);
        assert!(t.is_scalar());
        assert_eq!(t.value(), 2.5);
    }

    #[test]
    fn grad_starts_zero_and_accumulates() {
        let t = Tensor::parameter(&[2], vec![1.0, 2.0]);
        assert_eq!(t.grad(), vec![0.0, 0.0]);
        t.accumulate_grad(&[0.5, 1.5]);
        t.accumulate_grad(&[0.5, 1.5]);
        assert_eq!(t.grad(), vec![1.0, 3.0]);
        t.zero_grad();
        assert_eq!(t.grad(), vec![0.0, 0.0]);
    }

    #[test]
    fn clone_shares_storage() {
        let t = Tensor::zeros(&[3]);
        let u = t.clone();
        u.set(1, 7.0);
        assert_eq!(t.get(1), 7.0);
        assert!(t.same_storage(&u));
    }

    #[test]
    #[should_panic]
    fn shape_value_mismatch_panics() {
        let _ = Tensor::from_vec(&[2, 2], vec![1.0]);
    }
}
