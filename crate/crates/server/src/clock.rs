//! Time as the server sees it: the wall clock, or a virtual clock that only
//! moves when told to.

use std::sync::Arc;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use tokio::sync::watch;

#[derive(Debug, Clone)]
pub enum Clock {
    Wall,
    /// Milliseconds since server start, advanced by hand.
    Virtual(Arc<watch::Sender<u64>>),
}

impl Clock {
    pub fn virtual_clock() -> Clock {
        Clock::Virtual(Arc::new(watch::channel(0).0))
    }

    pub fn is_virtual(&self) -> bool {
        matches!(self, Clock::Virtual(_))
    }

    pub fn now_ms(&self) -> u64 {
        match self {
            Clock::Wall => SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
            Clock::Virtual(tx) => *tx.borrow(),
        }
    }

    /// Moves a virtual clock forward and returns the new time. The wall clock
    /// cannot be moved.
    pub fn advance(&self, ms: u64) -> Option<u64> {
        match self {
            Clock::Wall => None,
            Clock::Virtual(tx) => {
                tx.send_modify(|now| *now = now.saturating_add(ms));
                Some(*tx.borrow())
            }
        }
    }

    /// Resolves once the clock reads at least `deadline`.
    pub async fn sleep_until(&self, deadline: u64) {
        match self {
            Clock::Wall => {
                let left = deadline.saturating_sub(self.now_ms());
                tokio::time::sleep(Duration::from_millis(left)).await;
            }
            Clock::Virtual(tx) => {
                let mut rx = tx.subscribe();
                // The sender lives as long as the clock, so this cannot fail
                // while someone holds the clock.
                let _ = rx.wait_for(|now| *now >= deadline).await;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[tokio::test]
    async fn virtual_timer_fires_only_at_the_deadline() {
        let clock = Clock::virtual_clock();
        let c = clock.clone();
        let timer = tokio::spawn(async move { c.sleep_until(120_000).await });
        clock.advance(119_000);
        tokio::time::sleep(Duration::from_millis(20)).await;
        assert!(!timer.is_finished());
        assert_eq!(clock.advance(1_000), Some(120_000));
        tokio::time::timeout(Duration::from_secs(1), timer).await.unwrap().unwrap();
    }

    #[tokio::test]
    async fn untouched_virtual_clock_never_fires() {
        let clock = Clock::virtual_clock();
        let r = tokio::time::timeout(Duration::from_millis(50), clock.sleep_until(1)).await;
        assert!(r.is_err());
        assert_eq!(clock.now_ms(), 0);
    }

    #[test]
    fn wall_clock_cannot_be_advanced() {
        assert_eq!(Clock::Wall.advance(5), None);
        assert!(Clock::Wall.now_ms() > 1_600_000_000_000);
    }
}
