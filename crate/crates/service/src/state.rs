//! In-memory sessions. Edits on one session are serialized by its mutex and
//! bump a version counter; rendered frames are cached per version.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use motionscene::render::ControlSignalFrame;
use motionscene::{DepthMap, MotionScene, RgbImage};
use parking_lot::{Mutex, RwLock};

use crate::api::{RenderJob, SessionInfo};
use crate::error::ApiError;

pub struct Session {
    pub id: u64,
    pub reference: Arc<RgbImage>,
    pub depth: Option<DepthMap>,
    scene: Arc<MotionScene>,
    version: u64,
    cache: HashMap<usize, Arc<ControlSignalFrame>>,
    jobs: HashMap<u64, RenderJob>,
    next_job: u64,
}

impl Session {
    pub fn new(id: u64, reference: RgbImage, depth: Option<DepthMap>, scene: MotionScene) -> Self {
        Session {
            id,
            reference: Arc::new(reference),
            depth,
            scene: Arc::new(scene),
            version: 1,
            cache: HashMap::new(),
            jobs: HashMap::new(),
            next_job: 1,
        }
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn scene(&self) -> &Arc<MotionScene> {
        &self.scene
    }

    pub fn snapshot(&self) -> (Arc<MotionScene>, u64) {
        (self.scene.clone(), self.version)
    }

    /// Installs an edited scene as the next version and drops stale frames.
    pub fn commit(&mut self, scene: MotionScene) -> u64 {
        self.scene = Arc::new(scene);
        self.version += 1;
        self.cache.clear();
        self.version
    }

    pub fn cached(&self, frame: usize) -> Option<Arc<ControlSignalFrame>> {
        self.cache.get(&frame).cloned()
    }

    /// Keeps a rendered frame only if it still matches the current version.
    pub fn store(&mut self, version: u64, frame: Arc<ControlSignalFrame>) -> bool {
        if version != self.version {
            return false;
        }
        self.cache.insert(frame.frame_index, frame);
        true
    }

    pub fn add_job(&mut self, mut job: RenderJob) -> RenderJob {
        job.id = self.next_job;
        self.next_job += 1;
        self.jobs.insert(job.id, job.clone());
        job
    }

    pub fn job(&self, id: u64) -> Option<&RenderJob> {
        self.jobs.get(&id)
    }

    pub fn update_job(&mut self, id: u64, f: impl FnOnce(&mut RenderJob)) {
        if let Some(job) = self.jobs.get_mut(&id) {
            f(job);
        }
    }

    pub fn info(&self) -> SessionInfo {
        SessionInfo {
            id: self.id,
            width: self.scene.width,
            height: self.scene.height,
            frames: self.scene.frame_count(),
            version: self.version,
            spheres: self.scene.spheres.len(),
            has_depth: self.depth.is_some(),
        }
    }
}

pub type SessionHandle = Arc<Mutex<Session>>;

#[derive(Default)]
pub struct Store {
    sessions: RwLock<HashMap<u64, SessionHandle>>,
    next_id: AtomicU64,
}

impl Store {
    pub fn insert(&self, make: impl FnOnce(u64) -> Session) -> SessionHandle {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed) + 1;
        let handle = Arc::new(Mutex::new(make(id)));
        self.sessions.write().insert(id, handle.clone());
        handle
    }

    pub fn get(&self, id: u64) -> Result<SessionHandle, ApiError> {
        self.sessions
            .read()
            .get(&id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("no session {id}")))
    }

    pub fn remove(&self, id: u64) -> Result<(), ApiError> {
        self.sessions
            .write()
            .remove(&id)
            .map(|_| ())
            .ok_or_else(|| ApiError::NotFound(format!("no session {id}")))
    }

    pub fn len(&self) -> usize {
        self.sessions.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
