// Entry point: boot the app against a bundled example instance.  The
// service address defaults to port 8000 on the page's host and can be
// overridden with ?ws=ws://host:port.

import { boot } from './app.js'
import { SAMPLE_PROBLEM } from './sample_problem.js'

const params = new URLSearchParams(location.search)
const wsBase = params.get('ws') ?? `ws://${location.hostname || '127.0.0.1'}:8000`
const mount = document.getElementById('app')

if (mount) {
  boot({ mount, problem: SAMPLE_PROBLEM, wsBase }).catch((err: unknown) => {
    mount.textContent = `could not reach the service at ${wsBase}: ${String(err)}`
  })
}
