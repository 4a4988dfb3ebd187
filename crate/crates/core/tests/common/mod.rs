#![allow(dead_code)]

pub mod svr_qp;
