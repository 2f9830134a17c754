//! Benchmark tasks and data loading: closed-form target functions, the
//! equispaced sin/cos extrapolation protocol, MNIST/CIFAR-10 binary readers,
//! and a 1-d Poisson collocation problem.

pub mod cifar;
pub mod functions;
pub mod idx;
pub mod poisson;

pub use cifar::load_cifar10_batch;
pub use functions::{
    make_function_dataset, make_sincos_dataset, BenchmarkFn, Dataset, Split, TaskKind,
};
pub use idx::{load_mnist_images, load_mnist_labels, load_mnist_pair};
pub use poisson::{fit_poisson, poisson_loss_and_grad, poisson_sine, solution_rmse, PdeTask};
