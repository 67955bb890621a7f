use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::message::Message2;

/// Alice → Bob classical channel: FIFO, lossless, exactly-once.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassicalChannel {
    queue: VecDeque<Message2>,
    sent: u64,
    received: u64,
}

impl ClassicalChannel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn send(&mut self, bits: Message2) {
        self.queue.push_back(bits);
        self.sent += 1;
    }

    /// Removes the oldest message. An empty channel is an error rather than a
    /// wait: the in-process protocols are turn based.
    pub fn recv(&mut self) -> Result<Message2> {
        let bits = self.queue.pop_front().ok_or(Error::WouldBlock)?;
        self.received += 1;
        Ok(bits)
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn sent(&self) -> u64 {
        self.sent
    }

    pub fn received(&self) -> u64 {
        self.received
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(s: &str) -> Message2 {
        s.parse().unwrap()
    }

    #[test]
    fn send_then_recv() {
        let mut ch = ClassicalChannel::new();
        ch.send(m("01"));
        assert_eq!(ch.len(), 1);
        ch.send(m("11"));
        assert_eq!(ch.recv().unwrap(), m("01"));
        assert_eq!(ch.recv().unwrap(), m("11"));
        assert!(ch.is_empty());
    }

    #[test]
    fn fifo_order() {
        let mut ch = ClassicalChannel::new();
        ch.send(m("10"));
        ch.send(m("11"));
        assert_eq!([ch.recv().unwrap(), ch.recv().unwrap()], [m("10"), m("11")]);
    }

    #[test]
    fn empty_recv_would_block() {
        let mut ch = ClassicalChannel::new();
        assert!(matches!(ch.recv(), Err(Error::WouldBlock)));
        assert_eq!(ch.received(), 0);
    }

    #[test]
    fn thousand_messages_in_order() {
        let mut ch = ClassicalChannel::new();
        let sent: Vec<Message2> = (0..1000).map(|i| Message2::ALL[(i * 7 + i / 3) % 4]).collect();
        for b in &sent {
            ch.send(*b);
        }
        let got: Vec<Message2> = (0..1000).map(|_| ch.recv().unwrap()).collect();
        assert_eq!(got, sent);
        assert_eq!((ch.sent(), ch.received()), (1000, 1000));
    }

    proptest! {
        #[test]
        fn matches_list_oracle(ops in prop::collection::vec(prop::option::of(0usize..4), 0..200)) {
            let mut ch = ClassicalChannel::new();
            let mut oracle: Vec<Message2> = Vec::new();
            for op in ops {
                match op {
                    Some(v) => {
                        ch.send(Message2::ALL[v]);
                        oracle.push(Message2::ALL[v]);
                    }
                    None => {
                        if oracle.is_empty() {
                            prop_assert!(matches!(ch.recv(), Err(Error::WouldBlock)));
                        } else {
                            prop_assert_eq!(ch.recv().unwrap(), oracle.remove(0));
                        }
                    }
                }
                prop_assert_eq!(ch.len(), oracle.len());
            }
            prop_assert_eq!(ch.sent() - ch.received(), oracle.len() as u64);
        }
    }
}
