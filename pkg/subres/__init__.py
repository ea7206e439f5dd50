import subres.errors
import subres.io
import subres.trig
import subres.geometry
import subres.bem
import subres.oracles
import subres.linear
import subres.nonlinear
import subres.config
import subres.plot
import subres.qc
import subres.batch
import subres.cli
