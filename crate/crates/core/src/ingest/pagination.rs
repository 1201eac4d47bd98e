//! Cursor pagination for explorers that cap the number of transactions per
//! response (the Ripple data API returns at most 100).

use serde::Serialize;

use super::record::Interval;
use super::FetchError;

pub const RIPPLE_MAX_PAGE: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PageRequest {
    pub interval: Interval,
    pub limit: usize,
    /// Opaque continuation token from the previous page.
    pub marker: Option<String>,
}

/// What a page response tells the pager.
#[derive(Clone, Debug, Default)]
pub struct PageInfo {
    pub len: usize,
    pub marker: Option<String>,
    pub last_timestamp: Option<i64>,
}

/// Produces request descriptors until a short page signals exhaustion.
#[derive(Clone, Debug)]
pub struct Pager {
    page_size: usize,
    next: Option<PageRequest>,
}

impl Pager {
    pub fn new(interval: Interval, page_size: usize) -> Result<Self, FetchError> {
        if page_size == 0 || page_size > RIPPLE_MAX_PAGE {
            return Err(FetchError::Config(format!(
                "page size must be in 1..={RIPPLE_MAX_PAGE}, got {page_size}"
            )));
        }
        Ok(Self {
            page_size,
            next: Some(PageRequest {
                interval,
                limit: page_size,
                marker: None,
            }),
        })
    }

    pub fn next_request(&self) -> Option<&PageRequest> {
        self.next.as_ref()
    }

    pub fn advance(&mut self, page: PageInfo) {
        let Some(current) = self.next.take() else {
            return;
        };
        if page.len < self.page_size {
            return;
        }
        self.next = Some(match page.marker {
            Some(marker) => PageRequest {
                marker: Some(marker),
                ..current
            },
            None => {
                // Without a marker, resume from the last timestamp seen;
                // overlapping records are dropped by the caller's dedup.
                let last = page.last_timestamp.unwrap_or(current.interval.start);
                let start = if last > current.interval.start {
                    last
                } else {
                    current.interval.start + 1
                };
                if start >= current.interval.end {
                    return;
                }
                PageRequest {
                    interval: Interval {
                        start,
                        end: current.interval.end,
                    },
                    limit: current.limit,
                    marker: None,
                }
            }
        });
    }
}

/// Drives a pager to completion. `fetch_page` returns the page's items plus
/// its pagination info; returns all items and the requests issued.
pub fn paginate<T, F>(interval: Interval, page_size: usize, mut fetch_page: F) -> Result<(Vec<T>, Vec<PageRequest>), FetchError>
where
    F: FnMut(&PageRequest) -> Result<(Vec<T>, PageInfo), FetchError>,
{
    let mut pager = Pager::new(interval, page_size)?;
    let mut items = Vec::new();
    let mut issued = Vec::new();
    while let Some(req) = pager.next_request().cloned() {
        let (page, info) = fetch_page(&req)?;
        items.extend(page);
        issued.push(req);
        pager.advance(info);
    }
    Ok((items, issued))
}

/// Ripple flavour: page size capped at 100.
pub fn paginate_ripple<T, F>(interval: Interval, page_size: usize, fetch_page: F) -> Result<(Vec<T>, Vec<PageRequest>), FetchError>
where
    F: FnMut(&PageRequest) -> Result<(Vec<T>, PageInfo), FetchError>,
{
    paginate(interval, page_size.min(RIPPLE_MAX_PAGE), fetch_page)
}
