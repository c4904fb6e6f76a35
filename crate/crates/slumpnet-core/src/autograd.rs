//! Reverse-mode automatic differentiation.
//!
//! Every traced tensor owns a [`Node`] in a dynamically built graph.
//! Monotonically increasing node ids double as a topological order:
//! a node's parents always carry smaller ids because they existed
//! before it. Backpropagation therefore visits nodes in descending id
//! order, which guarantees each node's gradient is complete before its
//! own backward function runs, and that every node runs exactly once
//! even when the graph fans out and reconverges.
//!
//! A backward function receives the gradient of the loss with respect
//! to the node's output and accumulates contributions directly into the
//! node's parents. Untraced inputs (for example the input batch) never
//! become parents, so no gradient work is spent on them.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::scalar::Scalar;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// Gradient callback: consumes the output gradient and pushes
/// contributions into captured parent nodes.
pub(crate) type BackwardFn<T> = Box<dyn Fn(&[T])>;

/// One vertex of the gradient graph.
pub struct Node<T: Scalar> {
    id: u64,
    label: &'static str,
    numel: usize,
    parents: Vec<Rc<Node<T>>>,
    backward: Option<BackwardFn<T>>,
    grad: RefCell<Option<Vec<T>>>,
}

impl<T: Scalar> Node<T> {
    /// A leaf node: holds gradients but has no backward function.
    pub(crate) fn leaf(numel: usize) -> Rc<Node<T>> {
        Rc::new(Node {
            id: fresh_id(),
            label: "leaf",
            numel,
            parents: Vec::new(),
            backward: None,
            grad: RefCell::new(None),
        })
    }

    /// An interior node produced by an operation.
    pub(crate) fn op(
        label: &'static str,
        numel: usize,
        parents: Vec<Rc<Node<T>>>,
        backward: BackwardFn<T>,
    ) -> Rc<Node<T>> {
        debug_assert!(!parents.is_empty(), "op node needs at least one parent");
        Rc::new(Node {
            id: fresh_id(),
            label,
            numel,
            parents,
            backward: Some(backward),
            grad: RefCell::new(None),
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn label(&self) -> &'static str {
        self.label
    }

    pub(crate) fn is_leaf(&self) -> bool {
        self.backward.is_none()
    }

    /// Adds `g` into this node's gradient slot.
    pub(crate) fn accumulate(&self, g: &[T]) {
        debug_assert_eq!(g.len(), self.numel, "gradient size mismatch on {}", self.label);
        let mut slot = self.grad.borrow_mut();
        match slot.as_mut() {
            Some(acc) => {
                for (a, &x) in acc.iter_mut().zip(g.iter()) {
                    *a += x;
                }
            }
            None => *slot = Some(g.to_vec()),
        }
    }

    /// Adds an owned buffer, avoiding a copy when the slot is empty.
    pub(crate) fn accumulate_owned(&self, g: Vec<T>) {
        debug_assert_eq!(g.len(), self.numel, "gradient size mismatch on {}", self.label);
        let mut slot = self.grad.borrow_mut();
        match slot.as_mut() {
            Some(acc) => {
                for (a, x) in acc.iter_mut().zip(g.into_iter()) {
                    *a += x;
                }
            }
            None => *slot = Some(g),
        }
    }

    pub(crate) fn grad_clone(&self) -> Option<Vec<T>> {
        self.grad.borrow().clone()
    }

    pub(crate) fn take_grad(&self) -> Option<Vec<T>> {
        self.grad.borrow_mut().take()
    }
}

/// Runs backpropagation from `root`, seeding it with `seed`.
///
/// Interior gradients are released as soon as they have been consumed;
/// leaf gradients stay in place for the optimizer to collect.
pub(crate) fn run_backward<T: Scalar>(root: &Rc<Node<T>>, seed: Vec<T>) {
    let mut nodes: Vec<Rc<Node<T>>> = Vec::new();
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut stack: Vec<Rc<Node<T>>> = vec![root.clone()];
    while let Some(n) = stack.pop() {
        if seen.insert(n.id) {
            for p in &n.parents {
                if !seen.contains(&p.id) {
                    stack.push(p.clone());
                }
            }
            nodes.push(n);
        }
    }
    nodes.sort_unstable_by(|a, b| b.id.cmp(&a.id));

    root.accumulate_owned(seed);
    for n in &nodes {
        if let Some(f) = &n.backward {
            // Interior node: consume (and free) its gradient.
            let g = n.grad.borrow_mut().take();
            if let Some(g) = g {
                f(&g);
            }
        }
    }
}
