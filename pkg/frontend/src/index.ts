export { AliasTable, aliasMass, buildAliasTable } from "./alias";
export {
  ArtifactError,
  ScheduleEntry,
  ScheduleFile,
  ScoresFile,
  readIndexFile,
  readSchedule,
  readScores,
} from "./formats";
export { ldexp, pairwiseSumPow2, portableExp, pow2 } from "./math";
export { mix64, streamU64, u64ToUnit } from "./rng";
export { softmaxProbs } from "./softmax";
export { BoundSampler, SamplerInfo, epochIndices, info, open } from "./sampler";
