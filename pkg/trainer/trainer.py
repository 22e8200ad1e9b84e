"""
Модуль циклу навчання моделі ранжування.

Кожна епоха складається з одного пакета: вибірка списків, прямий прохід у
режимі навчання, середнє втрат ListMLE за списками, зворотний прохід і
крок Adam. Частина інфлюенсерів відкладається для валідації, і після
кожної епохи на ній обчислюється NDCG@10 та NDCG@50. Усі джерела
випадковості похідні від зерна навчання, тому повтор із тим самим
зерном дає ідентичні параметри та історію.
"""

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import ModelConfig, TrainConfig
from core.errors import ContractError, DataError, NumericalError
from core.monitor import SILENT, RunMonitor
from hetnet.temporal import TemporalNetwork
from metrics.ranking import evaluate_ranking, rank_influencers
from model.checkpoint import Checkpoint, save_checkpoint
from model.influencer_rank import bind, forward, predict
from model.params import ModelVariant, Params, init_params
from numkit import tape as ops
from numkit.optim import AdamState, adam_step
from numkit.tape import Tape, backward
from trainer.lists import sample_lists
from trainer.loss import listmle_loss


VALIDATION_KS: Tuple[int, ...] = (10, 50)


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    val_ndcg10: float
    val_ndcg50: float
    seconds: float


@dataclass
class TrainingHistory:
    """
    Історія навчання по епохах.

    Час виконання зберігається окремо від метрик, щоб файл історії був
    побітово відтворюваним.
    """
    records: List[EpochRecord] = field(default_factory=list)

    def append(self, record: EpochRecord):
        self.records.append(record)

    @property
    def losses(self) -> List[float]:
        return [record.loss for record in self.records]

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "epoch": [r.epoch for r in self.records],
            "loss": [r.loss for r in self.records],
            "val_ndcg@10": [r.val_ndcg10 for r in self.records],
            "val_ndcg@50": [r.val_ndcg50 for r in self.records],
        })

    def timing_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "epoch": [r.epoch for r in self.records],
            "seconds": [r.seconds for r in self.records],
        })

    def write(self, directory: Path) -> Tuple[Path, Path]:
        """
        Записує history.csv і timing.csv у каталог.

        Raises:
            DataError: Якщо файли не вдалося записати
        """
        directory = Path(directory)
        history_path, timing_path = directory / "history.csv", directory / "timing.csv"
        try:
            directory.mkdir(parents=True, exist_ok=True)
            self.frame().to_csv(history_path, index=False)
            self.timing_frame().to_csv(timing_path, index=False)
        except OSError as e:
            raise DataError(f"Не вдалося записати історію навчання в {directory}: {e}") from e
        return history_path, timing_path


@dataclass
class TrainResult:
    params: Params
    history: TrainingHistory
    variant: ModelVariant
    train_ids: Tuple[str, ...]
    validation_ids: Tuple[str, ...]


def split_validation(ids: Sequence[str], fraction: float,
                     rng: np.random.Generator) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """Відкладає частку інфлюенсерів для валідації; обидві частини впорядковані."""
    count = int(round(fraction * len(ids)))
    chosen = set(rng.choice(len(ids), size=count, replace=False).tolist()) if count else set()
    validation = tuple(sorted(ids[i] for i in chosen))
    training = tuple(sorted(ids[i] for i in range(len(ids)) if i not in chosen))
    return training, validation


def validation_ndcg(net: TemporalNetwork, params: Params, variant: ModelVariant,
                    labels: Mapping[str, float], ids: Sequence[str]) -> Tuple[float, float]:
    if not ids:
        return float("nan"), float("nan")
    scores = predict(net, params, variant)
    position = {influencer_id: i for i, influencer_id in enumerate(net.influencer_ids)}
    ranked = rank_influencers(list(ids), [scores[position[i]] for i in ids], labels)
    metrics = evaluate_ranking(ranked, VALIDATION_KS)
    return metrics["ndcg@10"], metrics["ndcg@50"]


def batch_loss(tape: Tape, scores, lists, position: Mapping[str, int]):
    """Середнє втрат ListMLE за списками пакета у фіксованому порядку."""
    total = None
    for labeled in lists:
        rows = [position[i] for i in labeled.ids]
        loss = listmle_loss(ops.rows(scores, rows), labeled.rates, labeled.ids)
        total = loss if total is None else total + loss
    return tape.mark_loss(ops.scale(total, 1.0 / len(lists)))


def train(net: TemporalNetwork, labels: Mapping[str, float], train_cfg: TrainConfig,
          model_cfg: ModelConfig, variant: ModelVariant = ModelVariant.FULL,
          monitor: RunMonitor = SILENT, checkpoint_path: Optional[Path] = None,
          initial: Optional[Params] = None) -> TrainResult:
    """
    Навчає модель на часовій мережі.

    Args:
        net: Вхідні знімки навчального вікна
        labels: Залученість кожного інфлюенсера в цільовому вікні
        train_cfg: Параметри навчання
        model_cfg: Розмірності моделі
        variant: Варіант архітектури
        monitor: Монітор для журналювання епох
        checkpoint_path: Шлях проміжних контрольних точок
        initial: Початкові параметри замість ініціалізації

    Returns:
        TrainResult з параметрами та історією

    Raises:
        ContractError: Якщо мітки не покривають усіх інфлюенсерів
        NumericalError: Якщо функція втрат стала нескінченною
    """
    missing = [i for i in net.influencer_ids if i not in labels]
    if missing:
        raise ContractError(f"Немає міток для інфлюенсерів: {', '.join(missing[:5])}")

    seed = train_cfg.seed
    split_rng = np.random.default_rng([seed, 1])
    list_rng = np.random.default_rng([seed, 2])
    dropout_rng = np.random.default_rng([seed, 3])

    train_ids, validation_ids = split_validation(
        net.influencer_ids, train_cfg.validation_fraction, split_rng
    )
    position = {influencer_id: i for i, influencer_id in enumerate(net.influencer_ids)}
    params = dict(initial) if initial is not None else init_params(
        model_cfg, variant, net.features[0].shape[1]
    )
    state = AdamState.zeros_like(params)
    history = TrainingHistory()

    monitor.log(
        f"Навчання {variant.value}: {len(train_ids)} інфлюенсерів, "
        f"{len(validation_ids)} на валідації, k={net.k}"
    )
    for epoch in range(1, train_cfg.epochs + 1):
        started = time.perf_counter()
        lists = sample_lists(train_ids, train_cfg.list_size, train_cfg.lists_per_batch,
                             list_rng, labels)
        tape = Tape()
        scores = forward(net, bind(tape, params), "train", dropout_rng, variant,
                         model_cfg.dropout)
        loss = batch_loss(tape, scores, lists, position)
        value = float(loss.value[0, 0])
        if not np.isfinite(value):
            monitor.log(f"Епоха {epoch}: нескінченне значення втрат", force=True)
            raise NumericalError(f"Нескінченне значення втрат: епоха {epoch}, пакет 1")

        grads = backward(tape, loss)
        params, state = adam_step(params, grads, state, train_cfg.lr)
        ndcg10, ndcg50 = validation_ndcg(net, params, variant, labels, validation_ids)
        history.append(EpochRecord(epoch, value, ndcg10, ndcg50,
                                   time.perf_counter() - started))
        monitor.log(
            f"Епоха {epoch}: втрати {value:.6f}, val NDCG@10 {ndcg10:.4f}, "
            f"val NDCG@50 {ndcg50:.4f}"
        )

        if checkpoint_path is not None and train_cfg.checkpoint_every \
                and epoch % train_cfg.checkpoint_every == 0:
            path = Path(checkpoint_path).with_suffix(f".epoch{epoch}.ckpt")
            save_checkpoint(path, Checkpoint(
                params, model_cfg, variant, metadata={"epoch": epoch, "seed": seed}
            ))
            monitor.log(f"Проміжну контрольну точку збережено: {path}", force=True)

    return TrainResult(params, history, variant, train_ids, validation_ids)
