//! Append-only event log behind each session's SSE stream.

use std::convert::Infallible;
use std::sync::{Arc, Mutex};

use axum::response::sse::Event;
use futures::stream::{self, Stream};
use tokio::sync::Notify;

#[derive(Debug, Clone, PartialEq)]
pub struct LoggedEvent {
    pub name: &'static str,
    pub id: u64,
    pub data: String,
}

#[derive(Debug, Default)]
struct Inner {
    events: Vec<LoggedEvent>,
    closed: bool,
}

/// Subscribers replay everything logged so far, then follow live appends
/// until the log is closed.
#[derive(Debug, Default)]
pub struct EventLog {
    inner: Mutex<Inner>,
    notify: Notify,
}

impl EventLog {
    pub fn push(&self, name: &'static str, id: u64, data: String) {
        let mut inner = self.inner.lock().unwrap();
        if inner.closed {
            return;
        }
        inner.events.push(LoggedEvent { name, id, data });
        drop(inner);
        self.notify.notify_waiters();
    }

    /// Appends a final event and ends every stream. Later calls are ignored.
    pub fn close(&self, name: &'static str, id: u64, data: String) {
        let mut inner = self.inner.lock().unwrap();
        if inner.closed {
            return;
        }
        inner.events.push(LoggedEvent { name, id, data });
        inner.closed = true;
        drop(inner);
        self.notify.notify_waiters();
    }

    pub fn events(&self) -> Vec<LoggedEvent> {
        self.inner.lock().unwrap().events.clone()
    }

    fn next_after(&self, cursor: usize) -> Option<Option<LoggedEvent>> {
        let inner = self.inner.lock().unwrap();
        match inner.events.get(cursor) {
            Some(e) => Some(Some(e.clone())),
            None if inner.closed => Some(None),
            None => None,
        }
    }

    pub fn subscribe(self: Arc<Self>) -> impl Stream<Item = Result<Event, Infallible>> {
        stream::unfold((self, 0usize), |(log, cursor)| async move {
            loop {
                // register before checking so an append in between still wakes us
                let notified = log.notify.notified();
                match log.next_after(cursor) {
                    Some(Some(e)) => {
                        drop(notified);
                        let event = Event::default().event(e.name).id(e.id.to_string()).data(e.data);
                        return Some((Ok(event), (log, cursor + 1)));
                    }
                    Some(None) => return None,
                    None => notified.await,
                }
            }
        })
    }
}
