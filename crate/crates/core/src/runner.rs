use alloc::vec::Vec;

/// Executes independent replicas. Implementations may run them in any order
/// but must return results indexed by replica id.
pub trait ReplicaRunner: Sync {
    fn run<T, F>(&self, replicas: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs replicas one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ReplicaRunner for Sequential {
    fn run<T, F>(&self, replicas: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..replicas).map(f).collect()
    }
}
