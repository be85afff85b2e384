//! One module per subcommand.

pub mod build_dataset;
pub mod eval;
pub mod export;
pub mod sweep;
pub mod train;

/// Size the global worker pool. Results never depend on the pool size, so a
/// pool left over from an earlier call in the same process is fine.
pub(crate) fn init_thread_pool(threads: usize) {
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
}
