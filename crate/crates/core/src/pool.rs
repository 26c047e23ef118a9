use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

/// Resolve a requested thread count; 0 means use the machine's parallelism.
pub fn effective_threads(requested: usize) -> usize {
    if requested > 0 {
        requested
    } else {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    }
}

/// Sum `f(start, end)` over the fixed-size chunks covering `0..total`,
/// distributing chunks over worker threads. Chunk boundaries depend only on
/// `chunk_size`, and exact integer addition is order-independent, so the
/// result is bit-identical for every thread count.
pub fn parallel_chunk_sum<F>(total: u64, chunk_size: u64, threads: usize, f: F) -> u128
where
    F: Fn(u64, u64) -> u128 + Sync,
{
    assert!(chunk_size > 0);
    let threads = effective_threads(threads);
    let num_chunks = total.div_ceil(chunk_size);
    if threads <= 1 || num_chunks <= 1 {
        let mut acc: u128 = 0;
        let mut start = 0u64;
        while start < total {
            let end = (start + chunk_size).min(total);
            acc += f(start, end);
            start = end;
        }
        return acc;
    }
    let next = AtomicU64::new(0);
    let acc = Mutex::new(0u128);
    std::thread::scope(|scope| {
        for _ in 0..threads.min(num_chunks as usize) {
            scope.spawn(|| {
                let mut local: u128 = 0;
                loop {
                    let id = next.fetch_add(1, Ordering::Relaxed);
                    if id >= num_chunks {
                        break;
                    }
                    let start = id * chunk_size;
                    let end = (start + chunk_size).min(total);
                    local += f(start, end);
                }
                *acc.lock().unwrap() += local;
            });
        }
    });
    acc.into_inner().unwrap()
}

/// Apply `f` to every item, preserving the input order of results, with
/// work distributed over threads. Results are deterministic because each
/// output slot is written exactly once from its own input.
pub fn parallel_map<T, U, F>(items: &[T], threads: usize, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let threads = effective_threads(threads);
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<U>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads.min(items.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let out = f(&items[i]);
                *slots[i].lock().unwrap() = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("slot filled"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_sum_matches_serial_for_any_thread_count() {
        let serial: u128 = (0..1000u64).map(|i| (i * i) as u128).sum();
        for threads in [1, 2, 3, 8] {
            let par = parallel_chunk_sum(1000, 7, threads, |start, end| {
                (start..end).map(|i| (i * i) as u128).sum()
            });
            assert_eq!(par, serial);
        }
    }

    #[test]
    fn map_preserves_order() {
        let items: Vec<u64> = (0..100).collect();
        let out = parallel_map(&items, 4, |&x| x * 2);
        assert_eq!(out, (0..100).map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(parallel_chunk_sum(0, 16, 4, |_, _| 1), 0);
        let empty: Vec<u8> = vec![];
        assert!(parallel_map(&empty, 4, |_| 0u8).is_empty());
    }
}
